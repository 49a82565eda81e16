#include "aggfield/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "aggfield/errors.hpp"

namespace aggfield {

void QuadratureConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw std::invalid_argument("quadrature: rel_tol and abs_tol must be > 0");
  }
  if (max_subdivisions < 1) {
    throw std::invalid_argument("quadrature: max_subdivisions must be >= 1");
  }
  if (!(a_lambda_switch > 0.0)) {
    throw std::invalid_argument("quadrature: a_lambda_switch must be > 0");
  }
}

namespace {

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

// QUADPACK qk21 error heuristic on top of the Boost node tables.
Panel gk21(const Integrand& f, double a, double b) {
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
  using Gauss = boost::math::quadrature::gauss<double, 10>;
  const auto& xk = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();

  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  std::array<double, 21> fv{};
  fv[0] = f(center);
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double dx = half * xk[i];
    fv[2 * i - 1] = f(center - dx);
    fv[2 * i] = f(center + dx);
  }

  double kronrod = fv[0] * wk[0];
  double gauss = 0.0;
  double resabs = std::abs(fv[0]) * wk[0];
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double pair = fv[2 * i - 1] + fv[2 * i];
    kronrod += pair * wk[i];
    resabs += (std::abs(fv[2 * i - 1]) + std::abs(fv[2 * i])) * wk[i];
    if (i % 2 == 1) gauss += pair * wg[i / 2];
  }
  const double mean = 0.5 * kronrod;
  double resasc = std::abs(fv[0] - mean) * wk[0];
  for (std::size_t i = 1; i < xk.size(); ++i) {
    resasc += (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean)) * wk[i];
  }

  const double value = kronrod * half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * resabs, err);
  }
  if (!std::isfinite(value)) err = std::numeric_limits<double>::infinity();
  return Panel{a, b, value, err};
}

}  // namespace

QuadResult integrate_gauss_kronrod(const Integrand& f, double a, double b,
                                   const QuadratureConfig& cfg,
                                   std::span<const double> breakpoints) {
  std::vector<double> cuts{a};
  for (double x : breakpoints) {
    if (x > a && x < b) cuts.push_back(x);
  }
  std::sort(cuts.begin() + 1, cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.push_back(b);

  std::priority_queue<Panel> panels;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    panels.push(gk21(f, cuts[i], cuts[i + 1]));
  }
  int subdivisions = static_cast<int>(cuts.size()) - 1;

  auto totals = [&panels]() {
    // Summed from a copy so the result does not depend on heap layout
    // beyond the panel set itself.
    auto copy = panels;
    std::vector<Panel> all;
    all.reserve(copy.size());
    while (!copy.empty()) {
      all.push_back(copy.top());
      copy.pop();
    }
    std::sort(all.begin(), all.end(),
              [](const Panel& l, const Panel& r) { return l.a < r.a; });
    double value = 0.0;
    double error = 0.0;
    for (const auto& p : all) {
      value += p.value;
      error += p.error;
    }
    return std::pair{value, error};
  };

  double value = 0.0;
  double error = 0.0;
  {
    auto [v, e] = totals();
    value = v;
    error = e;
  }
  // Running sums are refreshed exactly every so often to shed drift.
  int since_refresh = 0;
  while (error > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value))) {
    if (subdivisions >= cfg.max_subdivisions) {
      return QuadResult{value, error, subdivisions, false};
    }
    const Panel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Panel has shrunk to machine resolution.
      return QuadResult{value, error, subdivisions, false};
    }
    panels.pop();
    const Panel left = gk21(f, worst.a, mid);
    const Panel right = gk21(f, mid, worst.b);
    panels.push(left);
    panels.push(right);
    ++subdivisions;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    if (++since_refresh == 64) {
      auto [v, e] = totals();
      value = v;
      error = e;
      since_refresh = 0;
    }
  }
  auto [v, e] = totals();
  return QuadResult{v, e, subdivisions, true};
}

QuadResult integrate_tanh_sinh(const std::function<double(double, double)>& f,
                               double a, double b, double rel_tol) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  double error = 0.0;
  double l1 = 0.0;
  std::size_t levels = 0;
  const double value = integrator.integrate(
      [&f](double x, double xc) { return f(x, xc); }, a, b, rel_tol, &error,
      &l1, &levels);
  const bool ok = std::isfinite(value) && error <= rel_tol * std::max(l1, std::abs(value));
  return QuadResult{value, error, static_cast<int>(levels), ok};
}

double integrate(const Integrand& f, double a, double b,
                 const QuadratureConfig& cfg,
                 std::span<const double> breakpoints) {
  const QuadResult gk = integrate_gauss_kronrod(f, a, b, cfg, breakpoints);
  if (gk.converged) return gk.value;

  // Fallback: tanh-sinh piecewise over the same partition.
  std::vector<double> cuts{a};
  for (double x : breakpoints) {
    if (x > a && x < b) cuts.push_back(x);
  }
  std::sort(cuts.begin() + 1, cuts.end());
  cuts.push_back(b);
  double total = 0.0;
  bool all_converged = true;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    const QuadResult ts = integrate_tanh_sinh(
        [&f](double x, double) { return f(x); }, cuts[i], cuts[i + 1],
        cfg.rel_tol);
    total += ts.value;
    all_converged = all_converged && ts.converged;
  }
  if (all_converged && std::isfinite(total)) return total;
  throw QuadratureError("quadrature did not converge on [" + std::to_string(a) +
                        ", " + std::to_string(b) + "] after " +
                        std::to_string(gk.subdivisions) +
                        " subdivisions (error estimate " +
                        std::to_string(gk.error) + ")");
}

}  // namespace aggfield
