#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "aggfield/grid.hpp"
#include "aggfield/quadrature.hpp"
#include "aggfield/theta_law.hpp"

namespace aggfield {

struct SingleTheta {
  double theta{0.0};
};
struct AggregateOf {
  int count{1};
  ThetaLaw law;
};
struct LimitOf {
  ThetaLaw law;
};
using Provenance = std::variant<SingleTheta, AggregateOf, LimitOf>;

std::string provenance_kind(const Provenance& p);

/// One synthesized field on the n1 x n2 torus.
struct FieldRealization {
  RealGrid values;
  Provenance provenance;
  std::uint64_t seed{0};
  double sigma2_eps{1.0};
  /// Non-fatal model diagnostics (e.g. aggregation with alpha <= 0).
  std::vector<std::string> warnings;

  [[nodiscard]] const LatticeSpec& lattice() const { return values.lattice(); }
};

/// i.i.d. N(0, sigma2) grid drawn from the noise stream of `seed`.
RealGrid white_noise(LatticeSpec lattice, double sigma2, std::uint64_t seed);

/// X - theta * (sum of the four circular neighbours).
RealGrid apply_ar_operator(const RealGrid& x, double theta);

/// Solves X - theta * (neighbour sum) = eps exactly on the torus by dividing
/// the DFT of white_noise(lattice, sigma2, seed) by 1 - 2 theta (cos + cos).
/// Throws NonStationary unless |theta| < 1/4.
FieldRealization simulate_ar_field(double theta, LatticeSpec lattice,
                                   double sigma2_eps, std::uint64_t seed);

/// Seed of replicate n inside aggregate_field.
std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t n);
/// Coefficients drawn by aggregate_field for (law, seed, count).
std::vector<double> aggregate_thetas(const ThetaLaw& law, std::uint64_t seed,
                                     int count);

/// N^{-1/2} times the sum of N independent single-theta fields with
/// coefficients from `law`. For alpha <= 0 the result carries a warning
/// instead of failing. Summation order is fixed, so the output does not depend
/// on the number of worker threads.
FieldRealization aggregate_field(const ThetaLaw& law, int count,
                                 LatticeSpec lattice, double sigma2_eps,
                                 std::uint64_t seed);

struct SpectralSynthesis {
  RealGrid values;
  /// Largest |imaginary part| left by the complex inverse transform.
  double max_abs_imag{0.0};
};

/// Gaussian field whose circulant covariance has eigenvalues (2 pi)^2 f_k,
/// i.e. expected periodogram f_k. The zero-frequency bin is always dropped,
/// so every realization has mean exactly zero.
SpectralSynthesis synthesize_from_spectrum(const RealGrid& f_values,
                                           std::uint64_t seed);

/// Limit field from a precomputed f_grid (sigma2 must match the grid).
FieldRealization limit_field_from_grid(const ThetaLaw& law,
                                       const RealGrid& f_values,
                                       double sigma2_eps, std::uint64_t seed);

/// Gaussian limit of the aggregation. Throws NonExistence for alpha <= 0.
FieldRealization simulate_limit_field(const ThetaLaw& law, LatticeSpec lattice,
                                      double sigma2_eps, std::uint64_t seed,
                                      const QuadratureConfig& quad = {});

}  // namespace aggfield
