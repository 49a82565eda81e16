#include <doctest.h>

#include <cmath>
#include <numeric>

#include "aggfield/errors.hpp"
#include "aggfield/field_sim.hpp"
#include "aggfield/memory_analysis.hpp"
#include "aggfield/spectral.hpp"
#include "oracle.hpp"

using namespace aggfield;
using oracle::pi;

namespace {

SpectralModel constant_model(double alpha) {
  return SpectralModel{ThetaLaw::make(alpha, PhiSpec::constant()), 1.0};
}

RadialSpectrum synthetic(const std::vector<double>& r, const std::vector<double>& m) {
  RadialSpectrum rad;
  rad.bin_edges.assign(r.size() + 1, 0.0);
  rad.mean_radius = r;
  rad.mean_ordinate = m;
  rad.count.assign(r.size(), 10);
  return rad;
}

std::vector<double> log_radii(double lo, double hi, int n) {
  std::vector<double> r;
  for (int i = 0; i < n; ++i) r.push_back(lo * std::pow(hi / lo, i / (n - 1.0)));
  return r;
}

}  // namespace

TEST_CASE("periodogram Parseval and constant field") {
  const LatticeSpec lat{40, 24};
  const auto x = simulate_ar_field(0.15, lat, 1.0, 3);
  const auto p = periodogram(x);
  const double area = (2 * pi / lat.n1) * (2 * pi / lat.n2);
  double lhs = 0.0;
  for (double v : p.ordinates.values()) lhs += v * area;
  double m2 = 0.0;
  for (double v : x.values.values()) m2 += v * v;
  m2 /= static_cast<double>(lat.size());
  CHECK(std::abs(lhs - m2) / m2 < 1e-10);

  RealGrid c(lat);
  for (double& v : c.values()) v = 2.5;
  const auto pc = periodogram(c);
  CHECK(pc.ordinates(0, 0) == doctest::Approx(2.5 * 2.5 * lat.size() / (4 * pi * pi)));
  double rest = 0.0;
  for (std::size_t i = 1; i < pc.ordinates.values().size(); ++i) rest += std::abs(pc.ordinates.values()[i]);
  CHECK(rest < 1e-20);
}

TEST_CASE("averager") {
  PeriodogramAverager avg;
  CHECK_THROWS_AS((void)avg.mean(), InsufficientData);
  const auto a = white_noise({8, 8}, 1.0, 1);
  const auto b = white_noise({8, 8}, 1.0, 2);
  avg.add(a);
  avg.add(periodogram(b));
  const auto m = avg.mean();
  CHECK(m.replicates == 2);
  CHECK(m.ordinates(3, 2) ==
        doctest::Approx(0.5 * (periodogram(a).ordinates(3, 2) + periodogram(b).ordinates(3, 2))));
  CHECK_THROWS_AS(avg.add(white_noise({8, 9}, 1.0, 1)), FormatError);
}

TEST_CASE("mean periodogram of limit fields targets f_grid") {
  const auto model = constant_model(2.0);
  const LatticeSpec lat{64, 64};
  const auto f = f_grid(model, lat);
  PeriodogramAverager avg;
  for (int r = 0; r < 100; ++r) avg.add(limit_field_from_grid(model.law, f, 1.0, r).values);
  const auto m = avg.mean();
  int inside = 0;
  int total = 0;
  for (int i = 0; i < lat.n1; ++i) {
    for (int j = 0; j < lat.n2; ++j) {
      const auto fr = fourier_frequency(i, j, lat);
      if (std::hypot(fr.lambda1, fr.lambda2) < 4 * 2 * pi / lat.n1) continue;
      const double ratio = m.ordinates(i, j) / f(i, j);
      inside += (ratio >= 0.8 && ratio <= 1.25);
      ++total;
    }
  }
  CHECK(inside >= 0.95 * total);
}

TEST_CASE("radial averaging") {
  const LatticeSpec lat{128, 128};
  // Isotropic input r^-1: each bin mean is close to its representative radius^-1.
  RealGrid g(lat);
  for (int i = 0; i < lat.n1; ++i) {
    for (int j = 0; j < lat.n2; ++j) {
      const auto f = fourier_frequency(i, j, lat);
      const double r = std::hypot(f.lambda1, f.lambda2);
      g(i, j) = r > 0 ? 1.0 / r : 0.0;
    }
  }
  const auto rad = radial_average(g, 24);
  CHECK(rad.bin_edges.size() == 25);
  CHECK(rad.bin_edges.front() == 0.0);
  CHECK(rad.bin_edges.back() == doctest::Approx(pi));
  for (std::size_t b = 0; b < rad.count.size(); ++b) {
    if (rad.count[b] < 4) continue;
    const double width = rad.bin_edges[b + 1] / std::max(rad.bin_edges[b], 1e-300);
    // Within a bin r varies by `width`; mean of 1/r vs 1/geometric-mean radius.
    CHECK(rad.mean_ordinate[b] * rad.mean_radius[b] == doctest::Approx(1.0).epsilon(std::log(width)));
  }
  // Every nonzero frequency inside the disk of radius pi is counted once.
  int in_disk = 0;
  for (int i = 0; i < lat.n1; ++i) {
    for (int j = 0; j < lat.n2; ++j) {
      const auto f = fourier_frequency(i, j, lat);
      const double r = std::hypot(f.lambda1, f.lambda2);
      in_disk += (r > 0 && r <= pi);
    }
  }
  CHECK(std::accumulate(rad.count.begin(), rad.count.end(), 0) == in_disk);

  // Point mass.
  RealGrid p(lat);
  p(5, 3) = 1.0;
  const auto pr = radial_average(p, 24);
  const auto f = fourier_frequency(5, 3, lat);
  const double r = std::hypot(f.lambda1, f.lambda2);
  for (std::size_t b = 0; b < pr.count.size(); ++b) {
    const bool holds = r > pr.bin_edges[b] && r <= pr.bin_edges[b + 1];
    CHECK((pr.mean_ordinate[b] != 0.0) == holds);
  }
  CHECK_THROWS(radial_average(p, 1));
}

TEST_CASE("memory estimation on noiseless inputs") {
  const auto r = log_radii(0.05, 0.5, 12);
  std::vector<double> m;
  for (double x : r) m.push_back(1.0 / x);
  const auto rep = estimate_memory(synthetic(r, m), {0.0, 1.0});
  CHECK(rep.slope == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(rep.alpha_hat == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rep.stderr_slope < 1e-10);
  CHECK(rep.bins_used == 12);
  CHECK(rep.classification == MemoryClass::long_power);

  const auto flat = estimate_memory(synthetic(r, std::vector<double>(r.size(), 3.0)), {0.0, 1.0});
  CHECK(flat.slope == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(flat.classification == MemoryClass::short_memory);
  CHECK(to_string(flat.classification) == "short");

  std::vector<double> lg;
  for (double x : r) lg.push_back(0.05 * std::abs(std::log(x * x)));
  const auto logrep = estimate_memory(synthetic(r, lg), {0.0, 1.0});
  CHECK(logrep.classification == MemoryClass::long_log);
  CHECK(logrep.log_coefficient == doctest::Approx(0.05).epsilon(1e-10));

  // Only four bins in range.
  CHECK_THROWS_AS(estimate_memory(synthetic(r, m), {0.05, 0.1}), InsufficientData);
  CHECK(default_fit_range({512, 256}).r_min == doctest::Approx(8 * pi / 512));
}

TEST_CASE("autocovariance from spectrum") {
  const LatticeSpec lat{16, 16};
  RealGrid flat(lat);
  for (double& v : flat.values()) v = 2.0 / (4 * pi * pi);
  const auto w = autocovariance_from_spectrum(flat);
  CHECK(w.gamma(0, 0) == doctest::Approx(2.0));
  for (std::size_t i = 1; i < w.gamma.values().size(); ++i) CHECK(std::abs(w.gamma.values()[i]) < 1e-14);

  const auto f = f_grid(constant_model(0.5), lat);
  const auto a = autocovariance_from_spectrum(f);
  CHECK(a.max_abs_imag < 1e-12);
  CHECK(a.gamma(0, 0) > 0.0);
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      CHECK(a.gamma(i, j) == doctest::Approx(a.gamma.wrapped(-i, -j)).epsilon(1e-10));
      CHECK(a.gamma(i, j) == doctest::Approx(a.gamma(j, i)).epsilon(1e-10));
    }
  }
}

TEST_CASE("lag-zero autocovariance against the integral at 1024^2") {
  const auto model = constant_model(2.0);
  const auto g = autocovariance_from_spectrum(f_grid(model, {1024, 1024})).gamma;
  const auto integ = check_integrability(model);
  REQUIRE(integ.integrable);
  CHECK(g(0, 0) == doctest::Approx(integ.estimate).epsilon(0.01));
}

TEST_CASE("summability diagnostic") {
  const std::vector<int> radii{0, 1, 2, 4, 8, 16, 32, 64, 128, 256};
  RealGrid white(LatticeSpec{64, 64});
  white(0, 0) = 1.0;
  const std::vector<int> small{0, 1, 2, 4, 8, 16};
  const auto w = summability_diagnostic(white, small);
  for (double s : w.partial_sums) CHECK(s == 1.0);
  CHECK(w.verdict == SummabilityVerdict::summable_looking);
  CHECK_THROWS_AS(summability_diagnostic(white, std::vector<int>{0, 17}), OutOfRange);
  CHECK_THROWS(summability_diagnostic(white, std::vector<int>{2, 1}));

  const LatticeSpec big{1024, 1024};
  const auto half = autocovariance_from_spectrum(f_grid(constant_model(0.5), big)).gamma;
  // The zeroed singular bin biases gamma(h) by an amount growing like |h|/n,
  // so increments are flat only while r is well below n.
  const auto flat = summability_diagnostic(half, std::vector<int>{0, 1, 2, 4, 8, 16, 32, 64});
  INFO("alpha 0.5 exponent up to 64: " << flat.increment_exponent);
  CHECK(std::abs(flat.increment_exponent) < 0.2);
  const auto h = summability_diagnostic(half, radii);
  INFO("alpha 0.5 exponent up to 256: " << h.increment_exponent);
  CHECK(h.increment_exponent > kSummableExponent);
  CHECK(h.verdict == SummabilityVerdict::non_summable_looking);

  const auto two = autocovariance_from_spectrum(f_grid(constant_model(2.0), big)).gamma;
  const auto t = summability_diagnostic(two, radii);
  INFO("alpha 2 exponent " << t.increment_exponent);
  CHECK(t.verdict == SummabilityVerdict::summable_looking);
  const double s32 = t.partial_sums[6];
  CHECK((t.partial_sums.back() - s32) < 0.01 * t.partial_sums.back());
}

TEST_CASE("lag covariance and moments") {
  RealGrid x(LatticeSpec{4, 4});
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) x(i, j) = (i % 2 == 0 ? 1.0 : -1.0) + 5.0;
  }
  CHECK(lag_covariance(x, 0, 0) == doctest::Approx(1.0));
  CHECK(lag_covariance(x, 1, 0) == doctest::Approx(-1.0));
  CHECK(lag_covariance(x, 0, 1) == doctest::Approx(1.0));

  const auto g = white_noise({256, 256}, 1.0, 8);
  const auto mo = sample_moments(g.values());
  CHECK(std::abs(mo.mean) < 0.02);
  CHECK(mo.variance == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(mo.skewness) < 0.05);
  CHECK(mo.kurtosis == doctest::Approx(3.0).epsilon(0.03));
  CHECK_THROWS_AS(sample_moments(std::vector<double>{1.0}), InsufficientData);
}
