#include "aggfield/memory_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "aggfield/errors.hpp"
#include "aggfield/fft.hpp"

namespace aggfield {

namespace {

constexpr double kPi = std::numbers::pi;

struct LinearFit {
  double slope{0.0};
  double intercept{0.0};
  double stderr_slope{0.0};
  double rss{0.0};
};

LinearFit ols(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    fit.rss += r * r;
  }
  fit.stderr_slope = x.size() > 2 ? std::sqrt(fit.rss / (n - 2.0) / sxx) : 0.0;
  return fit;
}

}  // namespace

PeriodogramEstimate periodogram(const RealGrid& values) {
  const LatticeSpec lattice = values.lattice();
  const auto spectrum = fft::forward_real(values.values(), lattice);
  const double norm = 1.0 / (4.0 * kPi * kPi * static_cast<double>(lattice.size()));
  RealGrid ordinates(lattice);
  auto out = ordinates.values();
  for (std::size_t i = 0; i < spectrum.size(); ++i) out[i] = std::norm(spectrum[i]) * norm;
  return PeriodogramEstimate{std::move(ordinates), 1};
}

PeriodogramEstimate periodogram(const FieldRealization& field) {
  return periodogram(field.values);
}

void PeriodogramAverager::add(const PeriodogramEstimate& estimate) {
  if (count_ == 0) {
    sum_ = RealGrid(estimate.lattice());
  } else if (!(estimate.lattice() == sum_.lattice())) {
    throw FormatError("periodogram average: lattice mismatch between inputs");
  }
  auto dst = sum_.values();
  auto src = estimate.ordinates.values();
  const double w = static_cast<double>(estimate.replicates);
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += w * src[i];
  count_ += estimate.replicates;
}

void PeriodogramAverager::add(const RealGrid& values) { add(periodogram(values)); }

PeriodogramEstimate PeriodogramAverager::mean() const {
  if (count_ == 0) throw InsufficientData("periodogram average: no inputs");
  RealGrid out = sum_;
  for (double& v : out.values()) v /= count_;
  return PeriodogramEstimate{std::move(out), count_};
}

RadialSpectrum radial_average(const RealGrid& values, int n_bins) {
  if (n_bins < 2) throw std::invalid_argument("radial_average: n_bins must be >= 2");
  const LatticeSpec lattice = values.lattice();
  const double r_f = 2.0 * kPi / std::max(lattice.n1, lattice.n2);

  RadialSpectrum rad;
  rad.bin_edges.resize(static_cast<std::size_t>(n_bins) + 1);
  rad.bin_edges[0] = 0.0;
  for (int i = 1; i < n_bins; ++i) {
    rad.bin_edges[i] = r_f * std::pow(kPi / r_f, static_cast<double>(i) / n_bins);
  }
  rad.bin_edges[n_bins] = kPi;
  std::vector<double> sum(n_bins, 0.0);
  std::vector<double> log_r(n_bins, 0.0);
  rad.count.assign(n_bins, 0);

  for (int k1 = 0; k1 < lattice.n1; ++k1) {
    for (int k2 = 0; k2 < lattice.n2; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      const Frequency freq = fourier_frequency(k1, k2, lattice);
      const double r = std::hypot(freq.lambda1, freq.lambda2);
      if (r > kPi) continue;
      const auto it = std::lower_bound(rad.bin_edges.begin() + 1, rad.bin_edges.end(), r);
      const auto bin = static_cast<std::size_t>(it - rad.bin_edges.begin()) - 1;
      sum[bin] += values(k1, k2);
      log_r[bin] += std::log(r);
      ++rad.count[bin];
    }
  }
  rad.mean_radius.resize(n_bins);
  rad.mean_ordinate.resize(n_bins);
  for (int i = 0; i < n_bins; ++i) {
    if (rad.count[i] > 0) {
      rad.mean_ordinate[i] = sum[i] / rad.count[i];
      rad.mean_radius[i] = std::exp(log_r[i] / rad.count[i]);
    } else {
      rad.mean_ordinate[i] = 0.0;
      rad.mean_radius[i] = std::sqrt(std::max(rad.bin_edges[i], r_f) * rad.bin_edges[i + 1]);
    }
  }
  return rad;
}

RadialSpectrum radial_average(const PeriodogramEstimate& pgram, int n_bins) {
  return radial_average(pgram.ordinates, n_bins);
}

FitRange default_fit_range(LatticeSpec lattice) {
  return FitRange{4.0 * 2.0 * kPi / std::max(lattice.n1, lattice.n2), 0.5};
}

std::string to_string(MemoryClass c) {
  switch (c) {
    case MemoryClass::short_memory: return "short";
    case MemoryClass::long_power: return "long_power";
    case MemoryClass::long_log: return "long_log";
    case MemoryClass::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

MemoryReport estimate_memory(const RadialSpectrum& rad, FitRange range) {
  std::vector<double> log_r;
  std::vector<double> log_m;
  std::vector<double> abs_log_r2;
  std::vector<double> m;
  for (std::size_t i = 0; i < rad.count.size(); ++i) {
    const double r = rad.mean_radius[i];
    if (rad.count[i] == 0 || r < range.r_min || r > range.r_max) continue;
    if (!(rad.mean_ordinate[i] > 0.0)) continue;
    log_r.push_back(std::log(r));
    log_m.push_back(std::log(rad.mean_ordinate[i]));
    abs_log_r2.push_back(std::abs(2.0 * std::log(r)));
    m.push_back(rad.mean_ordinate[i]);
  }
  if (log_r.size() < 5) {
    std::ostringstream msg;
    msg << "estimate_memory: need at least 5 nonempty bins in [" << range.r_min
        << ", " << range.r_max << "], have " << log_r.size();
    throw InsufficientData(msg.str());
  }

  const LinearFit power = ols(log_r, log_m);
  const LinearFit logfit = ols(abs_log_r2, m);
  double rss_log = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double pred = logfit.intercept + logfit.slope * abs_log_r2[i];
    if (!(pred > 0.0)) {
      rss_log = std::numeric_limits<double>::infinity();
      break;
    }
    const double r = log_m[i] - std::log(pred);
    rss_log += r * r;
  }

  MemoryReport report;
  report.slope = power.slope;
  report.intercept = power.intercept;
  report.alpha_hat = power.slope / 2.0 + 1.0;
  report.stderr_slope = power.stderr_slope;
  report.fit_range = range;
  report.bins_used = static_cast<int>(log_r.size());
  report.rss_power = power.rss;
  report.rss_log = rss_log;
  report.log_coefficient = logfit.slope;

  const double ratio = power.rss > 0.0 ? rss_log / power.rss
                                       : std::numeric_limits<double>::infinity();
  if (report.slope > kShortSlope - 2.0 * report.stderr_slope) {
    report.classification = MemoryClass::short_memory;
  } else if (logfit.slope > 0.0 && ratio < kLogWinRatio) {
    report.classification = MemoryClass::long_log;
  } else if (logfit.slope > 0.0 && ratio < kPowerWinRatio) {
    report.classification = MemoryClass::inconclusive;
  } else if (report.slope > -2.0) {
    report.classification = MemoryClass::long_power;
  } else {
    report.classification = MemoryClass::inconclusive;
  }
  return report;
}

Autocovariance autocovariance_from_spectrum(const RealGrid& f_values) {
  const LatticeSpec lattice = f_values.lattice();
  const double area = (2.0 * kPi / lattice.n1) * (2.0 * kPi / lattice.n2);
  std::vector<fft::Complex> spectrum(lattice.size());
  const auto f = f_values.values();
  for (std::size_t i = 0; i < f.size(); ++i) spectrum[i] = f[i] * area;
  const auto gamma = fft::backward(spectrum, lattice);
  Autocovariance out{RealGrid(lattice), 0.0};
  auto g = out.gamma.values();
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    g[i] = gamma[i].real();
    out.max_abs_imag = std::max(out.max_abs_imag, std::abs(gamma[i].imag()));
  }
  return out;
}

std::string to_string(SummabilityVerdict v) {
  return v == SummabilityVerdict::summable_looking ? "summable-looking"
                                                   : "non-summable-looking";
}

SummabilityResult summability_diagnostic(const RealGrid& gamma,
                                         std::span<const int> radii) {
  if (radii.empty()) throw std::invalid_argument("summability: no radii given");
  const int limit = std::min(gamma.n1(), gamma.n2()) / 4;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] < 0 || (i > 0 && radii[i] <= radii[i - 1])) {
      throw std::invalid_argument("summability: radii must be increasing and >= 0");
    }
    if (radii[i] > limit) {
      std::ostringstream msg;
      msg << "summability: radius " << radii[i] << " exceeds min(n1, n2)/4 = "
          << limit << " (periodic bias)";
      throw OutOfRange(msg.str());
    }
  }

  SummabilityResult out;
  out.radii.assign(radii.begin(), radii.end());
  // Sum shell by shell so S_r is accumulated in a fixed order.
  double total = 0.0;
  int done = -1;
  for (int r : radii) {
    for (int shell = done + 1; shell <= r; ++shell) {
      if (shell == 0) {
        total += std::abs(gamma(0, 0));
        continue;
      }
      for (int h = -shell; h <= shell; ++h) {
        total += std::abs(gamma.wrapped(h, shell)) + std::abs(gamma.wrapped(h, -shell));
      }
      for (int h = -shell + 1; h <= shell - 1; ++h) {
        total += std::abs(gamma.wrapped(shell, h)) + std::abs(gamma.wrapped(-shell, h));
      }
    }
    done = r;
    out.partial_sums.push_back(total);
  }

  std::vector<double> lx;
  std::vector<double> ly;
  bool any_growth = false;
  const std::size_t first = std::max<std::size_t>(1, radii.size() / 2);
  for (std::size_t i = first; i < radii.size(); ++i) {
    const double inc = (out.partial_sums[i] - out.partial_sums[i - 1]) /
                       (radii[i] - radii[i - 1]);
    if (inc > 1e-12 * out.partial_sums.back()) {
      any_growth = true;
      lx.push_back(0.5 * (std::log(std::max(radii[i - 1], 1)) + std::log(radii[i])));
      ly.push_back(std::log(inc));
    }
  }
  if (!any_growth) {
    out.increment_exponent = -std::numeric_limits<double>::infinity();
    out.verdict = SummabilityVerdict::summable_looking;
    return out;
  }
  if (lx.size() < 2) {
    throw InsufficientData("summability: need at least two growing increments to fit an exponent");
  }
  out.increment_exponent = ols(lx, ly).slope;
  out.verdict = out.increment_exponent < kSummableExponent
                    ? SummabilityVerdict::summable_looking
                    : SummabilityVerdict::non_summable_looking;
  return out;
}

std::vector<Frequency> SingularPoint::aliases() const {
  std::vector<double> a1{freq.lambda1};
  std::vector<double> a2{freq.lambda2};
  if (std::abs(freq.lambda1) == kPi) a1 = {kPi, -kPi};
  if (std::abs(freq.lambda2) == kPi) a2 = {kPi, -kPi};
  std::vector<Frequency> out;
  for (double x : a1) {
    for (double y : a2) out.push_back({x, y});
  }
  return out;
}

std::vector<SingularPoint> seasonal_scan(const SpectralModel& model,
                                         LatticeSpec lattice,
                                         const QuadratureConfig& quad,
                                         const ScanOptions& opts) {
  lattice.validate();
  auto f_or_inf = [&](Frequency freq) {
    try {
      return spectral_density(model, freq, quad);
    } catch (const Divergence&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  RealGrid coarse(lattice);
#pragma omp parallel for schedule(dynamic)
  for (int k1 = 0; k1 < lattice.n1; ++k1) {
    for (int k2 = 0; k2 < lattice.n2; ++k2) {
      coarse(k1, k2) = f_or_inf(fourier_frequency(k1, k2, lattice));
    }
  }

  const double h1 = 2.0 * kPi / lattice.n1;
  const double h2 = 2.0 * kPi / lattice.n2;
  std::vector<SingularPoint> found;
  for (int k1 = 0; k1 < lattice.n1; ++k1) {
    for (int k2 = 0; k2 < lattice.n2; ++k2) {
      const double centre = coarse(k1, k2);
      bool is_max = true;
      bool strict = false;
      for (int d1 = -1; d1 <= 1 && is_max; ++d1) {
        for (int d2 = -1; d2 <= 1; ++d2) {
          if (d1 == 0 && d2 == 0) continue;
          const double v = coarse.wrapped(k1 + d1, k2 + d2);
          if (v > centre) {
            is_max = false;
            break;
          }
          if (v < centre) strict = true;
        }
      }
      if (!is_max || !strict) continue;

      const Frequency p = fourier_frequency(k1, k2, lattice);
      std::vector<double> ring;
      for (int level = 0; level < opts.levels; ++level) {
        const double scale = std::ldexp(1.0, -level);
        double best = 0.0;
        for (int d1 = -1; d1 <= 1; ++d1) {
          for (int d2 = -1; d2 <= 1; ++d2) {
            if (d1 == 0 && d2 == 0) continue;
            best = std::max(best, f_or_inf({p.lambda1 + d1 * h1 * scale,
                                            p.lambda2 + d2 * h2 * scale}));
          }
        }
        ring.push_back(best);
      }
      bool increasing = true;
      for (std::size_t i = 1; i < ring.size(); ++i) increasing = increasing && ring[i] > ring[i - 1];
      const double growth = ring.back() / ring.front();
      if (increasing && growth >= opts.growth_threshold) {
        found.push_back(SingularPoint{p, growth});
      }
    }
  }
  return found;
}

double lag_covariance(const RealGrid& x, int h1, int h2) {
  double mean = 0.0;
  for (double v : x.values()) mean += v;
  mean /= static_cast<double>(x.size());
  double acc = 0.0;
  for (int i = 0; i < x.n1(); ++i) {
    for (int j = 0; j < x.n2(); ++j) {
      acc += (x(i, j) - mean) * (x.wrapped(i + h1, j + h2) - mean);
    }
  }
  return acc / static_cast<double>(x.size());
}

SampleMoments sample_moments(std::span<const double> xs) {
  if (xs.size() < 2) throw InsufficientData("sample_moments: need at least two values");
  const auto n = static_cast<double>(xs.size());
  SampleMoments m;
  for (double x : xs) m.mean += x;
  m.mean /= n;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  for (double x : xs) {
    const double d = x - m.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.variance = m2 * n / (n - 1.0);
  m.skewness = m3 / std::pow(m2, 1.5);
  m.kurtosis = m4 / (m2 * m2);
  return m;
}

}  // namespace aggfield
