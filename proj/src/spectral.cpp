#include "aggfield/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "aggfield/errors.hpp"

namespace aggfield {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPiSq = 4.0 * kPi * kPi;

double wrap_angle(double x) {
  if (x >= -kPi && x <= kPi) return x;
  return std::remainder(x, 2.0 * kPi);
}

// Cosine sum seen from the law's singular point: for mirrored laws the
// frequency is reflected to (pi - |l1|, pi - |l2|), which maps
// cos l -> -cos l and puts the singularity at gap == 0 in both cases.
struct Effective {
  double s{0.0};
  double gap{2.0};
};

Frequency reflect_to_origin(SupportSign support, Frequency freq) {
  const double l1 = wrap_angle(freq.lambda1);
  const double l2 = wrap_angle(freq.lambda2);
  if (support == SupportSign::positive) return {l1, l2};
  return {kPi - std::abs(l1), kPi - std::abs(l2)};
}

Effective effective(SupportSign support, Frequency freq) {
  const CosineSum cs = cosine_sum(reflect_to_origin(support, freq));
  return {cs.sum, cs.gap};
}

// int_0^{1/4} Phi(1/4 - z) z^alpha / (gap/2 + 2 z s)^2 dz with Phi = C phi.
double direct_integral(const ThetaLaw& law, Effective e,
                       const QuadratureConfig& quad) {
  const double alpha = law.alpha();
  const auto& phi = law.phi();

  if (e.gap == 0.0) {
    // s == 2: denominator 16 z^2, integrand z^(alpha - 2).
    if (alpha <= 1.0) {
      throw Divergence("spectral density diverges at the singular frequency for alpha <= 1");
    }
    const double beta = alpha - 2.0;
    double value = 0.0;
    if (beta < 0.0) {
      const double p = beta + 1.0;
      value = integrate(
          [&](double t) { return phi(0.25 - std::pow(t, 1.0 / p)) / p; }, 0.0,
          std::pow(0.25, p), quad);
    } else {
      value = integrate(
          [&](double z) { return std::pow(z, beta) * phi(0.25 - z); }, 0.0,
          0.25, quad);
    }
    return law.norm_constant() * value / 16.0;
  }

  // Breakpoints on a geometric ladder around the peak scale of 1/d^2.
  std::vector<double> zcuts;
  if (e.s > 0.0) {
    const double peak = e.gap / (4.0 * e.s);
    for (double z = 0.25 * peak; z < 0.25 && zcuts.size() < 48; z *= 4.0) {
      zcuts.push_back(z);
    }
  }

  const double half_gap = 0.5 * e.gap;
  const double two_s = 2.0 * e.s;
  double value = 0.0;
  if (alpha < 0.0) {
    const double p = alpha + 1.0;
    std::vector<double> tcuts;
    tcuts.reserve(zcuts.size());
    for (double z : zcuts) tcuts.push_back(std::pow(z, p));
    value = integrate(
        [&](double t) {
          const double z = std::pow(t, 1.0 / p);
          const double d = half_gap + two_s * z;
          return phi(0.25 - z) / (p * d * d);
        },
        0.0, std::pow(0.25, p), quad, tcuts);
  } else {
    value = integrate(
        [&](double z) {
          const double d = half_gap + two_s * z;
          return std::pow(z, alpha) * phi(0.25 - z) / (d * d);
        },
        0.0, 0.25, quad, zcuts);
  }
  return law.norm_constant() * value;
}

// 4^-alpha gap^(alpha-1) s^(-alpha-1) int_0^A u^alpha Phi(1/4 (1 - u/A)) / (1+u)^2 du
double transformed_integral(const ThetaLaw& law, Effective e,
                            const QuadratureConfig& quad) {
  const double alpha = law.alpha();
  const double a_lam = e.s / e.gap;
  auto shape = [&](double u) { return law.full_phi(0.25 * (1.0 - u / a_lam)); };

  const double head_end = std::min(1.0, a_lam);
  double head = 0.0;
  if (alpha < 0.0) {
    const double p = alpha + 1.0;
    head = integrate(
        [&](double v) {
          const double u = std::pow(v, 1.0 / p);
          return shape(u) / (p * (1.0 + u) * (1.0 + u));
        },
        0.0, std::pow(head_end, p), quad);
  } else {
    head = integrate(
        [&](double u) {
          return std::pow(u, alpha) * shape(u) / ((1.0 + u) * (1.0 + u));
        },
        0.0, head_end, quad);
  }

  double tail = 0.0;
  if (a_lam > 1.0) {
    // u = e^w; u^(alpha+1) / (1+u)^2 written as u^(alpha-1) / (1 + 1/u)^2.
    tail = integrate(
        [&](double w) {
          const double u = std::exp(w);
          const double q = 1.0 + 1.0 / u;
          return std::pow(u, alpha - 1.0) * shape(u) / (q * q);
        },
        0.0, std::log(a_lam), quad);
  }

  const double prefactor = std::pow(4.0, -alpha) * std::pow(e.gap, alpha - 1.0) *
                           std::pow(e.s, -alpha - 1.0);
  return prefactor * (head + tail);
}

double density_effective(const ThetaLaw& law, Effective e,
                         const QuadratureConfig& quad) {
  if (e.gap > 0.0 && e.s / e.gap > quad.a_lambda_switch) {
    return transformed_integral(law, e, quad);
  }
  return direct_integral(law, e, quad);
}

}  // namespace

void SpectralModel::validate() const {
  if (!(sigma2_eps > 0.0) || !std::isfinite(sigma2_eps)) {
    throw OutOfRange("sigma2_eps must be > 0");
  }
}

CosineSum cosine_sum(Frequency freq) {
  const double l1 = freq.lambda1;
  const double l2 = freq.lambda2;
  const double s1 = std::sin(0.5 * l1);
  const double s2 = std::sin(0.5 * l2);
  const double c1 = std::cos(0.5 * l1);
  const double c2 = std::cos(0.5 * l2);
  return CosineSum{std::cos(l1) + std::cos(l2), 2.0 * (s1 * s1 + s2 * s2),
                   2.0 * (c1 * c1 + c2 * c2)};
}

double ar_denominator(double theta, Frequency freq) {
  const CosineSum cs = cosine_sum(freq);
  // 1 - 2 theta s rewritten around whichever of s = +-2 makes it small.
  if (theta >= 0.0) return (1.0 - 4.0 * theta) + 2.0 * theta * cs.gap;
  return (1.0 + 4.0 * theta) - 2.0 * theta * cs.cogap;
}

double a_lambda(Frequency freq) {
  const CosineSum cs = cosine_sum(freq);
  if (cs.gap == 0.0) return std::numeric_limits<double>::infinity();
  return cs.sum / cs.gap;
}

double f_direct(const SpectralModel& model, Frequency freq,
                const QuadratureConfig& quad) {
  const Effective e = effective(model.law.support(), freq);
  return model.sigma2_eps / kFourPiSq * direct_integral(model.law, e, quad);
}

double f_transformed(const SpectralModel& model, Frequency freq,
                     const QuadratureConfig& quad) {
  const Effective e = effective(model.law.support(), freq);
  if (e.gap == 0.0) {
    if (model.law.alpha() <= 1.0) {
      throw Divergence("spectral density diverges at the singular frequency for alpha <= 1");
    }
    throw RouteInvalid("transformed route undefined where A_lambda is infinite");
  }
  const double a_lam = e.s / e.gap;
  if (!(a_lam > quad.a_lambda_switch)) {
    std::ostringstream msg;
    msg << "transformed route requires A_lambda > " << quad.a_lambda_switch
        << " (got " << a_lam << ")";
    throw RouteInvalid(msg.str());
  }
  return model.sigma2_eps / kFourPiSq * transformed_integral(model.law, e, quad);
}

double spectral_density(const SpectralModel& model, Frequency freq,
                        const QuadratureConfig& quad) {
  const Effective e = effective(model.law.support(), freq);
  return model.sigma2_eps / kFourPiSq * density_effective(model.law, e, quad);
}

double euler_integral(double alpha, double rel_tol) {
  if (!(alpha > -1.0 && alpha < 1.0)) {
    throw OutOfRange("Euler integral requires -1 < alpha < 1");
  }
  if (alpha == 0.0) return 1.0;
  // u = t/(1-t): u^alpha/(1+u)^2 du = t^alpha (1-t)^(-alpha) dt on (0, 1).
  const QuadResult r = integrate_tanh_sinh(
      [alpha](double t, double tc) {
        const double one_minus = tc > 0.0 ? tc : 1.0 - t;
        const double lead = tc < 0.0 ? -tc : t;
        return std::pow(lead, alpha) * std::pow(one_minus, -alpha);
      },
      0.0, 1.0, rel_tol);
  if (!r.converged) {
    throw QuadratureError("Euler integral quadrature did not converge");
  }
  return r.value;
}

double euler_integral_closed_form(double alpha) {
  if (alpha == 0.0) return 1.0;
  return kPi * alpha / std::sin(kPi * alpha);
}

double c_alpha(const SpectralModel& model) {
  const double alpha = model.law.alpha();
  if (!(alpha > -1.0 && alpha < 1.0)) {
    throw OutOfRange("c_alpha requires -1 < alpha < 1");
  }
  const double euler = euler_integral(alpha);
  const double closed = euler_integral_closed_form(alpha);
  if (std::abs(euler - closed) > 1e-9 * closed) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "Euler integral cross-check failed at alpha = " << alpha << ": "
        << euler << " vs " << closed;
    throw QuadratureError(msg.str());
  }
  return model.sigma2_eps / kFourPiSq * std::pow(16.0, -alpha) *
         model.law.phi_at_quarter() * euler;
}

double c_one(const SpectralModel& model) {
  if (model.law.alpha() != 1.0) throw OutOfRange("c_one requires alpha == 1");
  return model.sigma2_eps / kFourPiSq / 16.0 * model.law.phi_at_quarter();
}

double asymptote(const SpectralModel& model, Frequency freq) {
  const double alpha = model.law.alpha();
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw OutOfRange("asymptote defined for 0 < alpha <= 1");
  }
  const Frequency local = reflect_to_origin(model.law.support(), freq);
  const double r2 = local.lambda1 * local.lambda1 + local.lambda2 * local.lambda2;
  if (r2 == 0.0) throw Divergence("asymptote is infinite at the singular frequency");
  if (alpha == 1.0) return c_one(model) * std::abs(std::log(r2));
  return c_alpha(model) * std::pow(r2, alpha - 1.0);
}

IntegrabilityReport check_integrability(const SpectralModel& model,
                                        const QuadratureConfig& quad,
                                        const IntegrabilityOptions& opts) {
  // Integrals over the torus are invariant under the shift by (pi, pi) that
  // swaps the two supports, so both are integrated around the origin in the
  // reflected coordinates.
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const ThetaLaw& law = model.law;
  const double scale = model.sigma2_eps / kFourPiSq;
  auto f_polar = [&](double r, double phi) {
    const CosineSum cs = cosine_sum({r * std::cos(phi), r * std::sin(phi)});
    return scale * density_effective(law, {cs.sum, cs.gap}, quad);
  };

  constexpr double r0 = 1.0;
  constexpr double sector = 0.25 * kPi;
  // Square minus the unit disk, by the eight-fold symmetry of f.
  const double outer = 8.0 * Rule::integrate(
      [&](double phi) {
        const double r_edge = kPi / std::cos(phi);
        return Rule::integrate([&](double r) { return f_polar(r, phi) * r; },
                               r0, r_edge);
      },
      0.0, sector);

  // Annulus 2^-(k+1) < r < 2^-k in log-radius, where the integrand f r^2 is
  // smooth for every power-law or logarithmic blow-up.
  auto ring = [&](int k) {
    const double w_hi = -k * std::numbers::ln2;
    const double w_lo = w_hi - std::numbers::ln2;
    return 8.0 * Rule::integrate(
        [&](double phi) {
          return Rule::integrate(
              [&](double w) {
                const double r = std::exp(w);
                return f_polar(r, phi) * r * r;
              },
              w_lo, w_hi);
        },
        0.0, sector);
  };

  IntegrabilityReport report;
  double estimate = outer;
  report.refinement_trace.push_back(estimate);
  std::vector<double> increments;
  for (int k = 0; k < opts.max_levels; ++k) {
    const double inc = ring(k);
    increments.push_back(inc);
    estimate += inc;
    report.refinement_trace.push_back(estimate);

    if (!std::isfinite(estimate) || estimate > opts.divergence_bound) {
      report.integrable = false;
      report.estimate = estimate;
      report.reason = "partial integrals exceed the divergence bound";
      return report;
    }
    if (k < opts.min_levels) continue;

    const double prev = increments[increments.size() - 4];
    const double ratio = prev > 0.0 ? std::cbrt(inc / prev) : 0.0;
    report.increment_ratio = ratio;
    if (ratio >= opts.divergent_ratio) {
      report.integrable = false;
      report.estimate = estimate;
      std::ostringstream msg;
      msg << "increments do not decay (ratio " << ratio << " per halving)";
      report.reason = msg.str();
      return report;
    }
    const double tail = inc * ratio / (1.0 - ratio);
    if (tail <= opts.rel_tol * estimate) {
      report.integrable = true;
      report.estimate = estimate + tail;
      std::ostringstream msg;
      msg << "increments decay geometrically (ratio " << ratio << ")";
      report.reason = msg.str();
      return report;
    }
  }
  report.integrable = false;
  report.estimate = estimate;
  report.reason = "undecided after the maximum number of refinement levels";
  return report;
}

Frequency fourier_frequency(int k1, int k2, LatticeSpec lattice) {
  const double l1 = kPi * (2.0 * signed_index(k1, lattice.n1) / lattice.n1);
  const double l2 = kPi * (2.0 * signed_index(k2, lattice.n2) / lattice.n2);
  return {l1, l2};
}

RealGrid f_grid(const SpectralModel& model, LatticeSpec lattice,
                const QuadratureConfig& quad) {
  lattice.validate();
  model.validate();
  const int h1 = lattice.n1 / 2;
  const int h2 = lattice.n2 / 2;
  const bool square = lattice.n1 == lattice.n2;
  const bool finite_at_singularity = model.law.alpha() > 1.0;

  // f is even in each component: evaluate on the folded quadrant
  // 0 <= a <= n1/2, 0 <= b <= n2/2 and mirror, so the symmetry is exact.
  RealGrid folded(LatticeSpec{h1 + 1, h2 + 1});
#pragma omp parallel for schedule(dynamic)
  for (int a = 0; a <= h1; ++a) {
    for (int b = square ? a : 0; b <= h2; ++b) {
      const Frequency freq = fourier_frequency(a, b, lattice);
      const Effective e = effective(model.law.support(), freq);
      double value = 0.0;
      if (e.gap != 0.0 || finite_at_singularity) {
        value = model.sigma2_eps / kFourPiSq * density_effective(model.law, e, quad);
      }
      folded(a, b) = value;
    }
  }
  if (square) {
    for (int a = 0; a <= h1; ++a) {
      for (int b = 0; b < a; ++b) folded(a, b) = folded(b, a);
    }
  }

  RealGrid out(lattice);
  for (int k1 = 0; k1 < lattice.n1; ++k1) {
    const int a = std::min(k1, lattice.n1 - k1);
    for (int k2 = 0; k2 < lattice.n2; ++k2) {
      const int b = std::min(k2, lattice.n2 - k2);
      out(k1, k2) = folded(a, b);
    }
  }
  return out;
}

}  // namespace aggfield
