#include <doctest.h>

#include <cmath>

#include "aggfield/errors.hpp"
#include "aggfield/memory_analysis.hpp"
#include "aggfield/spectral.hpp"
#include "oracle.hpp"

using namespace aggfield;
using oracle::pi;

namespace {

SpectralModel constant_model(double alpha, double sigma2 = 1.0,
                             SupportSign sign = SupportSign::positive) {
  return SpectralModel{ThetaLaw::make(alpha, PhiSpec::constant(), sign), sigma2};
}

}  // namespace

TEST_CASE("ar_denominator and a_lambda") {
  CHECK(ar_denominator(0.0, {0.7, -2.1}) == 1.0);
  CHECK(ar_denominator(0.2, {0.0, 0.0}) == doctest::Approx(0.2));
  CHECK(ar_denominator(0.2, {pi, pi}) == doctest::Approx(1.8));
  CHECK(ar_denominator(-0.2, {pi, pi}) == doctest::Approx(0.2));
  CHECK(a_lambda({pi, pi}) == doctest::Approx(-0.5));
  CHECK(a_lambda({pi / 2, pi / 2}) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::isinf(a_lambda({0.0, 0.0})));
  // Half-angle forms keep relative accuracy near the origin.
  const auto cs = cosine_sum({1e-9, 1e-9});
  CHECK(cs.gap == doctest::Approx(2e-18).epsilon(1e-12));
}

TEST_CASE("f_direct closed-form values") {
  // alpha = 2 at the origin: sigma2/(4 pi^2) * 192/16 * int z^0 dz = 3/(4 pi^2).
  const auto m2 = constant_model(2.0);
  CHECK(f_direct(m2, {0.0, 0.0}) == doctest::Approx(3.0 / (4.0 * pi * pi)).epsilon(1e-12));
  // Cosines vanish: d = 1 for every theta.
  for (const double alpha : {-0.5, 0.5, 1.0, 3.0}) {
    CHECK(f_direct(constant_model(alpha, 2.0), {pi / 2, pi / 2}) ==
          doctest::Approx(2.0 / (4.0 * pi * pi)).epsilon(1e-12));
  }
  // alpha = 1 at (pi, pi): int_0^{1/4} 32 (1/4 - x)/(1 + 4x)^2 dx = 2 (1 - ln 2).
  const double inner = oracle::composite(
      [](double x) { return 32.0 * (0.25 - x) / ((1.0 + 4.0 * x) * (1.0 + 4.0 * x)); }, 0.0, 0.25, 100);
  CHECK(inner == doctest::Approx(2.0 * (1.0 - std::log(2.0))).epsilon(1e-13));
  CHECK(f_direct(constant_model(1.0), {pi, pi}) ==
        doctest::Approx(inner / (4.0 * pi * pi)).epsilon(1e-12));
}

TEST_CASE("f_direct against the brute-force oracle") {
  const Frequency freqs[] = {{0.3, 0.1}, {1.0, -2.0}, {0.02, 0.01}, {3.0, 3.1}, {1e-3, 0.0}};
  for (const double alpha : {-0.8, -0.3, 0.0, 0.5, 1.0, 2.5}) {
    const auto model = constant_model(alpha);
    for (const auto& f : freqs) {
      INFO("alpha " << alpha << " lambda " << f.lambda1 << "," << f.lambda2);
      CHECK(f_direct(model, f) ==
            doctest::Approx(oracle::spectral_constant_phi(alpha, f.lambda1, f.lambda2)).epsilon(1e-9));
    }
  }
}

TEST_CASE("transformed route") {
  const auto model = constant_model(0.5);
  const Frequency f{0.3, 0.1};
  CHECK(std::abs(f_transformed(model, f) - f_direct(model, f)) / f_direct(model, f) < 1e-8);
  CHECK_THROWS_AS(f_transformed(model, {pi / 2, pi / 2}), RouteInvalid);
  CHECK_THROWS_AS(f_transformed(model, {1.0, 1.0}), RouteInvalid);
  CHECK_THROWS_AS(f_transformed(model, {0.0, 0.0}), Divergence);
  CHECK_THROWS_AS(f_direct(model, {0.0, 0.0}), Divergence);
  CHECK_THROWS_AS(spectral_density(model, {0.0, 0.0}), Divergence);
  // Mirrored laws need A at the reflected frequency.
  const auto mir = constant_model(0.5, 1.0, SupportSign::mirrored);
  CHECK_THROWS_AS(f_transformed(mir, f), RouteInvalid);
  CHECK(f_transformed(mir, {pi - 0.3, pi - 0.1}) == doctest::Approx(f_direct(model, f)).epsilon(1e-9));
  // alpha = 1 has the closed form C [ln(1+A) + 1/(1+A) - 1] for the inner integral.
  const auto m1 = constant_model(1.0);
  const auto cs = cosine_sum({1e-5, 2e-5});
  const double a = cs.sum / cs.gap;
  const double exact = 0.25 / (cs.sum * cs.sum) * 32.0 * (std::log1p(a) + 1.0 / (1.0 + a) - 1.0) /
                       (4.0 * pi * pi);
  CHECK(f_transformed(m1, {1e-5, 2e-5}) == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("Euler integral and low-frequency constants") {
  for (const double a : {-0.9, -0.5, 0.1, 0.5, 0.9}) {
    const double exact = a == 0.0 ? 1.0 : pi * a / std::sin(pi * a);
    CHECK(euler_integral(a) == doctest::Approx(exact).epsilon(1e-10));
  }
  CHECK(euler_integral(1e-9) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(euler_integral_closed_form(0.0) == 1.0);
  CHECK(euler_integral(0.5) == doctest::Approx(pi / 2).epsilon(1e-12));
  CHECK_THROWS_AS(euler_integral(1.0), OutOfRange);

  CHECK(c_alpha(constant_model(0.5)) == doctest::Approx(3.0 / (8.0 * pi)).epsilon(1e-10));
  CHECK(c_alpha(constant_model(0.5, 2.0)) ==
        doctest::Approx(2.0 * c_alpha(constant_model(0.5))).epsilon(1e-14));
  CHECK(c_one(constant_model(1.0)) == doctest::Approx(1.0 / (2.0 * pi * pi)).epsilon(1e-12));
  CHECK(c_one(constant_model(1.0, 2.0)) == doctest::Approx(2.0 * c_one(constant_model(1.0))));
  CHECK_THROWS_AS(c_alpha(constant_model(1.0)), OutOfRange);
  CHECK_THROWS_AS(c_one(constant_model(0.5)), OutOfRange);
}

TEST_CASE("asymptote") {
  const auto half = constant_model(0.5);
  const double r = std::sqrt(0.5e-6);  // |lambda|^2 = 1e-6
  CHECK(asymptote(half, {r, r}) == doctest::Approx(3.0 / (8.0 * pi) * 1e3).epsilon(1e-9));
  const auto one = constant_model(1.0);
  const double r1 = std::sqrt(0.5e-8);
  CHECK(asymptote(one, {r1, r1}) ==
        doctest::Approx(std::log(1e8) / (2.0 * pi * pi)).epsilon(1e-9));
  // Depends on lambda only through its length.
  CHECK(asymptote(half, {1e-3, 0.0}) == doctest::Approx(asymptote(half, {0.0, -1e-3})));
  CHECK(asymptote(half, {0.6e-3, 0.8e-3}) == doctest::Approx(asymptote(half, {1e-3, 0.0})));
  CHECK_THROWS_AS(asymptote(constant_model(2.0), {0.1, 0.1}), OutOfRange);
  CHECK_THROWS_AS(asymptote(half, {0.0, 0.0}), Divergence);
  // Ratio tends to 1 along the diagonal.
  double prev = 1.0;
  for (const double t : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double err = std::abs(spectral_density(half, {t, t}) / asymptote(half, {t, t}) - 1.0);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-3);
  // Mirrored asymptote is measured from the (pi, pi) corner.
  const auto mir = constant_model(0.5, 1.0, SupportSign::mirrored);
  CHECK(asymptote(mir, {pi - 1e-3, -pi + 1e-3}) == doctest::Approx(asymptote(half, {1e-3, 1e-3})));
}

TEST_CASE("integrability") {
  const auto half = check_integrability(constant_model(0.5));
  CHECK(half.integrable);
  CHECK(half.refinement_trace.size() >= 10);
  const auto two = check_integrability(constant_model(2.0));
  CHECK(two.integrable);
  const auto neg = check_integrability(constant_model(-0.5));
  CHECK_FALSE(neg.integrable);
  // Nested estimates keep growing for the divergent law.
  for (std::size_t k = 1; k < neg.refinement_trace.size(); ++k) {
    CHECK(neg.refinement_trace[k] > neg.refinement_trace[k - 1]);
  }
  CHECK_FALSE(check_integrability(constant_model(0.0)).integrable);

  // alpha = 0.5: the integral is gamma(0, 0). Compare with the lattice sum of
  // f_grid; the zeroed singular bin and the cell discretization cost O(1/n).
  const auto grid = f_grid(constant_model(0.5), {512, 512});
  const auto acov = autocovariance_from_spectrum(grid);
  CHECK(acov.gamma(0, 0) == doctest::Approx(half.estimate).epsilon(0.01));
}

TEST_CASE("f_grid symmetries and singular bin") {
  const auto model = constant_model(0.5);
  const LatticeSpec lat{16, 16};
  const auto g = f_grid(model, lat);
  CHECK(g(0, 0) == 0.0);
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      CHECK(g(i, j) == g((16 - i) % 16, (16 - j) % 16));
      CHECK(g(i, j) == g(j, i));
      if (i + j > 0) {
        const auto f = fourier_frequency(i, j, lat);
        CHECK(g(i, j) == doctest::Approx(spectral_density(model, f)).epsilon(1e-13));
      }
    }
  }
  const auto rect = f_grid(model, {8, 12});
  CHECK(rect(3, 5) == doctest::Approx(spectral_density(model, fourier_frequency(3, 5, {8, 12}))));
  CHECK(fourier_frequency(8, 8, lat).lambda1 == pi);
  CHECK(fourier_frequency(9, 8, lat).lambda1 == doctest::Approx(-7.0 * pi / 8.0));

  const auto g2 = f_grid(constant_model(2.0), lat);
  CHECK(g2(0, 0) == doctest::Approx(3.0 / (4.0 * pi * pi)).epsilon(1e-12));

  // Mirrored law: singular bin is (n/2, n/2).
  const auto gm = f_grid(constant_model(0.5, 1.0, SupportSign::mirrored), lat);
  CHECK(gm(8, 8) == 0.0);
  CHECK(gm(0, 0) > 0.0);
  CHECK(std::isfinite(gm(0, 0)));
}

TEST_CASE("seasonal scan") {
  const LatticeSpec lat{32, 32};
  const auto mirrored = seasonal_scan(constant_model(0.5, 1.0, SupportSign::mirrored), lat);
  REQUIRE(mirrored.size() == 1);
  CHECK(mirrored[0].freq.lambda1 == pi);
  CHECK(mirrored[0].freq.lambda2 == pi);
  CHECK(mirrored[0].aliases().size() == 4);

  const auto positive = seasonal_scan(constant_model(0.5), lat);
  REQUIRE(positive.size() == 1);
  CHECK(positive[0].freq.lambda1 == 0.0);
  CHECK(positive[0].freq.lambda2 == 0.0);
  CHECK(positive[0].aliases().size() == 1);

  CHECK(seasonal_scan(constant_model(2.0, 1.0, SupportSign::mirrored), lat).empty());
  CHECK(seasonal_scan(constant_model(2.0), lat).empty());

  // Bounded at the origin, unbounded toward the corner.
  const auto mir = constant_model(0.5, 1.0, SupportSign::mirrored);
  CHECK(std::isfinite(spectral_density(mir, {0.0, 0.0})));
  CHECK(spectral_density(mir, {pi - 1e-4, pi - 1e-4}) > 10.0 * spectral_density(mir, {pi - 1e-2, pi - 1e-2}));
}
