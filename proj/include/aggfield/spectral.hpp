#pragma once

#include <string>
#include <vector>

#include "aggfield/grid.hpp"
#include "aggfield/quadrature.hpp"
#include "aggfield/theta_law.hpp"

namespace aggfield {

/// Frequency in radians per lattice step, components in [-pi, pi].
struct Frequency {
  double lambda1{0.0};
  double lambda2{0.0};
};

/// Aggregated model: coefficient law plus white-noise variance.
struct SpectralModel {
  ThetaLaw law;
  double sigma2_eps{1.0};

  void validate() const;
};

/// cos(l1) + cos(l2) together with 2 - sum and 2 + sum, both of the latter
/// evaluated through half-angle identities so they keep full relative
/// precision near (0, 0) and (pi, pi).
struct CosineSum {
  double sum{0.0};
  double gap{2.0};    ///< 2 - sum = 2 sin^2(l1/2) + 2 sin^2(l2/2)
  double cogap{2.0};  ///< 2 + sum = 2 cos^2(l1/2) + 2 cos^2(l2/2)
};

CosineSum cosine_sum(Frequency freq);

/// 1 - 2 theta (cos l1 + cos l2), the symbol of the four-neighbour operator.
double ar_denominator(double theta, Frequency freq);

/// (cos l1 + cos l2) / (2 - cos l1 - cos l2); +infinity at the origin.
double a_lambda(Frequency freq);

/// Spectral density by adaptive quadrature over the coefficient law, after
/// z = 1/4 - |x| (and t = z^(alpha+1) when alpha < 0). Throws Divergence at
/// the singular frequency when alpha <= 1.
double f_direct(const SpectralModel& model, Frequency freq,
                const QuadratureConfig& quad = {});

/// Spectral density through u = 4 z A_lambda, which regularizes the sharp
/// peak of the direct integrand near the singular frequency. Requires
/// A_lambda > quad.a_lambda_switch (evaluated at the reflected frequency for
/// mirrored laws); throws RouteInvalid otherwise.
double f_transformed(const SpectralModel& model, Frequency freq,
                     const QuadratureConfig& quad = {});

/// Picks the transformed route above the A_lambda switch, direct otherwise.
double spectral_density(const SpectralModel& model, Frequency freq,
                        const QuadratureConfig& quad = {});

/// int_0^inf u^alpha / (1 + u)^2 du by quadrature after u = t / (1 - t).
double euler_integral(double alpha, double rel_tol = 1e-13);
/// pi alpha / sin(pi alpha), with the removable point alpha = 0 filled in.
double euler_integral_closed_form(double alpha);

/// Constant of the power-law blow-up, -1 < alpha < 1. The numerical Euler
/// integral is used and cross-checked against the closed form.
double c_alpha(const SpectralModel& model);
/// Constant of the logarithmic blow-up, alpha == 1.
double c_one(const SpectralModel& model);

/// Leading low-frequency behaviour for 0 < alpha <= 1:
/// c_alpha |l|^(2 alpha - 2), or c_1 |ln |l|^2| at alpha == 1. For mirrored
/// laws |l| is the distance to the (pi, pi) corner.
double asymptote(const SpectralModel& model, Frequency freq);

struct IntegrabilityOptions {
  /// Relative size of the extrapolated tail at which the estimate is final.
  double rel_tol{1e-9};
  int min_levels{10};
  int max_levels{56};
  /// Geometric increment ratio at or above which the partial integrals are
  /// taken to grow without bound.
  double divergent_ratio{0.98};
  double divergence_bound{1e12};
};

struct IntegrabilityReport {
  bool integrable{false};
  /// Integral of f over [-pi, pi]^2 (extrapolated) when integrable, last
  /// partial value otherwise.
  double estimate{0.0};
  /// Partial integrals over the square minus disks of radius 2^-k around the
  /// singular point, k = 0, 1, ...
  std::vector<double> refinement_trace;
  /// Geometric mean ratio of successive increments at the final level.
  double increment_ratio{0.0};
  std::string reason;
};

IntegrabilityReport check_integrability(const SpectralModel& model,
                                        const QuadratureConfig& quad = {},
                                        const IntegrabilityOptions& opts = {});

/// Policy name stored with exported grids.
inline constexpr const char* kDcPolicy = "singular_bin_zero_when_alpha_le_1";

/// f at the Fourier frequencies 2 pi k / n mapped to (-pi, pi]. The bin at the
/// singular frequency (origin, or (pi, pi) for mirrored laws when both sizes
/// are even) holds 0 when alpha <= 1 and the finite value otherwise.
RealGrid f_grid(const SpectralModel& model, LatticeSpec lattice,
                const QuadratureConfig& quad = {});

/// Fourier frequency of bin (k1, k2) in (-pi, pi]^2.
Frequency fourier_frequency(int k1, int k2, LatticeSpec lattice);

}  // namespace aggfield
