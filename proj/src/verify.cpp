#include "aggfield/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "aggfield/errors.hpp"
#include "aggfield/rng.hpp"

namespace aggfield {

namespace {

constexpr double kPi = std::numbers::pi;

SpectralModel constant_model(double alpha, SupportSign sign, const VerifyOptions& opts) {
  return SpectralModel{ThetaLaw::make(alpha, PhiSpec::constant(), sign, opts.quad),
                       opts.sigma2_eps};
}

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Frequencies with A_lambda above the switch, radius log-uniform.
std::vector<Frequency> route_frequencies(int count, double a_switch, std::uint64_t seed) {
  auto eng = rng::make_engine(seed, 0, rng::Stream::spectrum);
  std::vector<Frequency> out;
  out.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(out.size()) < count) {
    const double log_r = std::log(1e-5) + rng::uniform_open01(eng) * (std::log(0.4) - std::log(1e-5));
    const double phi = 2.0 * kPi * rng::uniform_open01(eng);
    const Frequency f{std::exp(log_r) * std::cos(phi), std::exp(log_r) * std::sin(phi)};
    if (a_lambda(f) > a_switch) out.push_back(f);
  }
  return out;
}

CheckResult route_check(double alpha, const std::vector<Frequency>& freqs,
                        const VerifyOptions& opts) {
  const auto model = constant_model(alpha, SupportSign::positive, opts);
  CheckResult r{"route_agreement", alpha, 0.0, kRouteTolerance, true, {}};
  for (const auto& f : freqs) {
    const double d = f_direct(model, f, opts.quad);
    const double t = f_transformed(model, f, opts.quad);
    r.value = std::max(r.value, rel_err(t, d));
  }
  r.passed = r.value <= r.tolerance;
  r.detail = std::to_string(freqs.size()) + " frequencies";
  return r;
}

CheckResult euler_check() {
  CheckResult r{"euler_integral", 0.0, 0.0, kEulerTolerance, true, "alpha = 0.1 .. 0.9"};
  for (int k = 1; k <= 9; ++k) {
    const double a = 0.1 * k;
    r.value = std::max(r.value, rel_err(euler_integral(a), euler_integral_closed_form(a)));
  }
  r.passed = r.value <= r.tolerance;
  return r;
}

// |ratio - 1| along the diagonal must shrink with t and end below tol.
CheckResult asymptote_check(double alpha, const VerifyOptions& opts) {
  const auto model = constant_model(alpha, SupportSign::positive, opts);
  const AsymptoteFn fn = opts.asymptote_fn ? opts.asymptote_fn : AsymptoteFn(asymptote);
  const double tol = alpha < 1.0 ? kPowerRatioTolerance : kLogRatioTolerance;
  CheckResult r{"asymptote_ratio", alpha, 0.0, tol, true, {}};
  double prev = INFINITY;
  bool monotone = true;
  for (int e = 2; e <= 8; ++e) {
    const double t = std::pow(10.0, -e);
    const Frequency f{t, t};
    const double err = std::abs(spectral_density(model, f, opts.quad) / fn(model, f) - 1.0);
    if (!(err < prev) && err > 1e-7) monotone = false;
    prev = err;
  }
  r.value = prev;
  r.passed = monotone && prev <= tol;
  r.detail = monotone ? "monotone in t" : "not monotone in t";
  return r;
}

// alpha = 1, constant phi: the inner integral is C [ln(1+A) + 1/(1+A) - 1].
CheckResult log_closed_form_check(const VerifyOptions& opts) {
  const auto model = constant_model(1.0, SupportSign::positive, opts);
  CheckResult r{"log_closed_form", 1.0, 0.0, kClosedFormTolerance, true, {}};
  const double c = model.law.norm_constant();
  for (const double t : {0.3, 0.1, 1e-2, 1e-4, 1e-6}) {
    const Frequency f{t, 0.5 * t};
    const auto cs = cosine_sum(f);
    const double a = cs.sum / cs.gap;
    const double inner = c * (std::log1p(a) + 1.0 / (1.0 + a) - 1.0);
    const double exact = model.sigma2_eps / (4.0 * kPi * kPi) * 0.25 / (cs.sum * cs.sum) * inner;
    r.value = std::max(r.value, rel_err(spectral_density(model, f, opts.quad), exact));
  }
  r.passed = r.value <= r.tolerance;
  return r;
}

// alpha > 1, constant phi: f(0) = sigma2/(4 pi^2) C/16 (1/4)^(alpha-1)/(alpha-1).
CheckResult origin_check(double alpha, const VerifyOptions& opts) {
  const auto model = constant_model(alpha, SupportSign::positive, opts);
  const double exact = model.sigma2_eps / (4.0 * kPi * kPi) * model.law.norm_constant() /
                       16.0 * std::pow(0.25, alpha - 1.0) / (alpha - 1.0);
  CheckResult r{"origin_value", alpha, 0.0, kClosedFormTolerance, true, {}};
  r.value = rel_err(f_direct(model, {0.0, 0.0}, opts.quad), exact);
  r.passed = r.value <= r.tolerance;
  return r;
}

CheckResult reflection_check(double alpha, const VerifyOptions& opts) {
  const auto pos = constant_model(alpha, SupportSign::positive, opts);
  const auto mir = constant_model(alpha, SupportSign::mirrored, opts);
  CheckResult r{"reflection_duality", alpha, 0.0, kReflectionTolerance, true, {}};
  for (const double d : {1e-2, 1e-3}) {
    const double fm = spectral_density(mir, {kPi - d, kPi - d}, opts.quad);
    const double fp = spectral_density(pos, {d, d}, opts.quad);
    r.value = std::max(r.value, rel_err(fm, fp));
  }
  const double at_zero = spectral_density(mir, {0.0, 0.0}, opts.quad);
  r.passed = r.value <= r.tolerance && std::isfinite(at_zero);
  std::ostringstream s;
  s << "mirrored f(0,0) = " << at_zero;
  r.detail = s.str();
  return r;
}

template <class F>
CheckResult guarded(const std::string& name, double alpha, F&& run) {
  try {
    return run();
  } catch (const std::exception& e) {
    return CheckResult{name, alpha, NAN, 0.0, false, std::string("error: ") + e.what()};
  }
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& opts) {
  if (opts.route_samples < 1) throw OutOfRange("route_samples must be >= 1");
  for (const double a : opts.alphas) {
    if (!(a > -1.0)) throw InvalidExponent("alpha must satisfy alpha > -1");
  }
  std::vector<CheckResult> out;
  const auto freqs = route_frequencies(opts.route_samples, opts.quad.a_lambda_switch, opts.seed);
  for (const double a : opts.alphas) {
    out.push_back(guarded("route_agreement", a, [&] { return route_check(a, freqs, opts); }));
  }
  out.push_back(guarded("euler_integral", 0.0, [] { return euler_check(); }));
  for (const double a : opts.alphas) {
    if (a > 0.0 && a <= 1.0) {
      out.push_back(guarded("asymptote_ratio", a, [&] { return asymptote_check(a, opts); }));
    }
    if (a == 1.0) {
      out.push_back(guarded("log_closed_form", a, [&] { return log_closed_form_check(opts); }));
    }
    if (a > 1.0) {
      out.push_back(guarded("origin_value", a, [&] { return origin_check(a, opts); }));
    }
    out.push_back(guarded("reflection_duality", a, [&] { return reflection_check(a, opts); }));
  }
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.passed; });
}

void print_verification_table(std::ostream& out, const std::vector<CheckResult>& results) {
  char line[256];
  std::snprintf(line, sizeof line, "%-20s %7s %12s %10s  %s\n", "check", "alpha", "value",
                "tolerance", "result");
  out << line;
  for (const auto& r : results) {
    std::snprintf(line, sizeof line, "%-20s %7.3g %12.4e %10.1e  %s", r.name.c_str(), r.alpha,
                  r.value, r.tolerance, r.passed ? "PASS" : "FAIL");
    out << line;
    if (!r.detail.empty()) out << "  (" << r.detail << ")";
    out << '\n';
  }
}

}  // namespace aggfield
