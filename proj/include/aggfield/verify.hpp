#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "aggfield/quadrature.hpp"
#include "aggfield/spectral.hpp"

namespace aggfield {

struct CheckResult {
  std::string name;
  double alpha{0.0};
  double value{0.0};      ///< worst observed error (or the quantity checked)
  double tolerance{0.0};
  bool passed{false};
  std::string detail;
};

using AsymptoteFn = std::function<double(const SpectralModel&, Frequency)>;

struct VerifyOptions {
  std::vector<double> alphas{0.25, 0.5, 0.75, 1.0, 2.0};
  int route_samples{200};
  double sigma2_eps{1.0};
  std::uint64_t seed{0};
  QuadratureConfig quad{};
  /// Replaced by tests to check that a wrong constant is caught.
  AsymptoteFn asymptote_fn{};
};

inline constexpr double kRouteTolerance = 1e-8;
inline constexpr double kEulerTolerance = 1e-10;
inline constexpr double kReflectionTolerance = 1e-8;
inline constexpr double kClosedFormTolerance = 1e-9;
/// |ratio - 1| allowed at t = 1e-8 on the diagonal, for 0 < alpha < 1 and
/// alpha = 1 respectively.
inline constexpr double kPowerRatioTolerance = 2e-3;
inline constexpr double kLogRatioTolerance = 2e-2;

/// Battery on constant-phi laws: route agreement, Euler integral against its
/// closed form, asymptote ratios, closed forms at alpha = 1 and at the origin
/// for alpha > 1, and the mirrored/positive correspondence.
std::vector<CheckResult> run_verification(const VerifyOptions& opts);

bool all_passed(const std::vector<CheckResult>& results);

void print_verification_table(std::ostream& out,
                              const std::vector<CheckResult>& results);

}  // namespace aggfield
