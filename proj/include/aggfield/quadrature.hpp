#pragma once

#include <functional>
#include <span>

namespace aggfield {

/// Tolerances shared by every quadrature in the library.
struct QuadratureConfig {
  double rel_tol{1e-11};
  double abs_tol{1e-15};
  int max_subdivisions{4000};
  /// Frequencies with A_lambda above this use the transformed route.
  double a_lambda_switch{10.0};

  void validate() const;
};

struct QuadResult {
  double value{0.0};
  double error{0.0};
  int subdivisions{0};
  bool converged{false};
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 21-point Gauss-Kronrod over [a, b], bisecting the panel
/// with the largest error estimate. Interior breakpoints (sorted or not,
/// values outside (a, b) ignored) seed the initial partition.
QuadResult integrate_gauss_kronrod(const Integrand& f, double a, double b,
                                   const QuadratureConfig& cfg,
                                   std::span<const double> breakpoints = {});

/// Adaptive Gauss-Kronrod with a tanh-sinh fallback when the adaptive rule
/// stalls. Throws QuadratureError if neither meets the tolerance.
double integrate(const Integrand& f, double a, double b,
                 const QuadratureConfig& cfg,
                 std::span<const double> breakpoints = {});

/// Tanh-sinh on [a, b] for integrands with endpoint singularities. The
/// callback receives (x, distance from x to the nearest endpoint), which
/// keeps digits when the singular factor is written in terms of the
/// complement.
QuadResult integrate_tanh_sinh(
    const std::function<double(double, double)>& f, double a, double b,
    double rel_tol);

}  // namespace aggfield
