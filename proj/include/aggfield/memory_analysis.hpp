#pragma once

#include <span>
#include <string>
#include <vector>

#include "aggfield/field_sim.hpp"
#include "aggfield/grid.hpp"
#include "aggfield/spectral.hpp"

namespace aggfield {

/// Ordinates |DFT(x)_k|^2 / (4 pi^2 n1 n2) at the Fourier frequencies, so that
/// sum_k I_k (2 pi)^2 / (n1 n2) is the sample second moment and the
/// expectation targets f.
struct PeriodogramEstimate {
  RealGrid ordinates;
  int replicates{1};

  [[nodiscard]] const LatticeSpec& lattice() const { return ordinates.lattice(); }
};

PeriodogramEstimate periodogram(const RealGrid& values);
PeriodogramEstimate periodogram(const FieldRealization& field);

/// Mean of periodograms, accumulated in call order.
class PeriodogramAverager {
 public:
  void add(const RealGrid& values);
  void add(const PeriodogramEstimate& estimate);
  [[nodiscard]] int count() const { return count_; }
  /// Throws InsufficientData if nothing was added.
  [[nodiscard]] PeriodogramEstimate mean() const;

 private:
  RealGrid sum_;
  int count_{0};
};

/// Annulus averages over log-spaced radii. Bin 0 is (0, e_1]; bins i >= 1 are
/// (e_i, e_{i+1}] with e_i = r_f (pi / r_f)^(i / n_bins) and r_f the smallest
/// nonzero |lambda| on the lattice, so the bins partition (0, pi].
struct RadialSpectrum {
  std::vector<double> bin_edges;      ///< n_bins + 1 entries, bin_edges[0] = 0
  std::vector<double> mean_radius;    ///< geometric mean |lambda| of members
  std::vector<double> mean_ordinate;
  std::vector<int> count;
};

RadialSpectrum radial_average(const RealGrid& values, int n_bins);
RadialSpectrum radial_average(const PeriodogramEstimate& pgram, int n_bins);

struct FitRange {
  double r_min{0.0};
  double r_max{0.5};
};

/// [4 * 2 pi / max(n1, n2), 0.5]: the lowest bins carry leakage from the
/// dropped zero frequency.
FitRange default_fit_range(LatticeSpec lattice);

enum class MemoryClass { short_memory, long_power, long_log, inconclusive };
std::string to_string(MemoryClass c);

/// Classification rules, in order:
///  - short:      slope > -0.1 - 2 * stderr
///  - long_log:   log model b |ln r^2| + a fits with rss_log < 0.5 rss_power
///  - inconclusive if 0.5 <= rss_log / rss_power < 2 (models indistinguishable)
///  - long_power: -2 < slope <= -0.1
///  - inconclusive otherwise.
/// rss_* are residual sums of squares of the log ordinates.
struct MemoryReport {
  double slope{0.0};      ///< fitted exponent gamma of |lambda|
  double intercept{0.0};
  double alpha_hat{0.0};  ///< slope / 2 + 1
  double stderr_slope{0.0};
  FitRange fit_range{};
  int bins_used{0};
  double rss_power{0.0};
  double rss_log{0.0};
  double log_coefficient{0.0};
  MemoryClass classification{MemoryClass::inconclusive};
};

inline constexpr double kShortSlope = -0.1;
inline constexpr double kLogWinRatio = 0.5;
inline constexpr double kPowerWinRatio = 2.0;

MemoryReport estimate_memory(const RadialSpectrum& rad, FitRange range);

struct Autocovariance {
  RealGrid gamma;  ///< gamma(h) at lag (h1 mod n1, h2 mod n2)
  double max_abs_imag{0.0};
};

/// gamma(h) = sum_k f_k (2 pi / n1)(2 pi / n2) e^{i lambda_k . h}.
Autocovariance autocovariance_from_spectrum(const RealGrid& f_values);

enum class SummabilityVerdict { summable_looking, non_summable_looking };
std::string to_string(SummabilityVerdict v);

/// Increment exponent below which partial sums are read as converging.
inline constexpr double kSummableExponent = -1.2;

struct SummabilityResult {
  std::vector<int> radii;
  std::vector<double> partial_sums;  ///< S_r = sum_{|h|_inf <= r} |gamma(h)|
  /// Exponent p of the per-unit-radius increments dS/dr ~ r^p, fitted over
  /// the upper half of the radii.
  double increment_exponent{0.0};
  SummabilityVerdict verdict{SummabilityVerdict::summable_looking};
};

/// Radii must be increasing and at most min(n1, n2) / 4.
SummabilityResult summability_diagnostic(const RealGrid& gamma,
                                         std::span<const int> radii);

struct SingularPoint {
  Frequency freq;           ///< canonical representative in (-pi, pi]^2
  double growth{0.0};       ///< ring maximum at the finest level / coarsest
  /// Every point of [-pi, pi]^2 that is the same torus point.
  [[nodiscard]] std::vector<Frequency> aliases() const;
};

struct ScanOptions {
  int levels{5};
  double growth_threshold{1.5};
};

/// Local maxima of f on the Fourier grid of `lattice` whose punctured
/// neighbourhood maximum keeps increasing as the neighbourhood shrinks by
/// halves, by at least growth_threshold overall.
std::vector<SingularPoint> seasonal_scan(const SpectralModel& model,
                                         LatticeSpec lattice,
                                         const QuadratureConfig& quad = {},
                                         const ScanOptions& opts = {});

/// Circular sample covariance at lag (h1, h2) after removing the grid mean.
double lag_covariance(const RealGrid& x, int h1, int h2);

struct SampleMoments {
  double mean{0.0};
  double variance{0.0};
  double skewness{0.0};
  double kurtosis{0.0};  ///< not excess: 3 for a Gaussian
};
SampleMoments sample_moments(std::span<const double> xs);

}  // namespace aggfield
