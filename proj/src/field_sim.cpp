#include "aggfield/field_sim.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "aggfield/errors.hpp"
#include "aggfield/fft.hpp"
#include "aggfield/rng.hpp"
#include "aggfield/spectral.hpp"

namespace aggfield {

namespace {

constexpr int kBlock = 16;

// 2 - (cos + cos) and 2 + (cos + cos) on the r2c half spectrum.
struct SymbolTable {
  LatticeSpec lattice;
  int width{0};
  std::vector<double> gap;
  std::vector<double> cogap;

  explicit SymbolTable(LatticeSpec l) : lattice(l), width(l.n2 / 2 + 1) {
    const std::size_t n = static_cast<std::size_t>(l.n1) * width;
    gap.resize(n);
    cogap.resize(n);
    for (int k1 = 0; k1 < l.n1; ++k1) {
      for (int k2 = 0; k2 < width; ++k2) {
        const CosineSum cs = cosine_sum(fourier_frequency(k1, k2, l));
        gap[static_cast<std::size_t>(k1) * width + k2] = cs.gap;
        cogap[static_cast<std::size_t>(k1) * width + k2] = cs.cogap;
      }
    }
  }
};

void check_stationary(double theta) {
  if (!(std::abs(theta) < 0.25)) {
    std::ostringstream msg;
    msg << "|theta| < 1/4 is required for a stationary solution (got theta = "
        << theta << ")";
    throw NonStationary(msg.str());
  }
}

RealGrid solve_on_torus(double theta, const RealGrid& noise,
                        const SymbolTable& table) {
  const LatticeSpec lattice = noise.lattice();
  auto spectrum = fft::forward_r2c(noise.values(), lattice);
  const double base = theta >= 0.0 ? 1.0 - 4.0 * theta : 1.0 + 4.0 * theta;
  const auto& comp = theta >= 0.0 ? table.gap : table.cogap;
  const double slope = theta >= 0.0 ? 2.0 * theta : -2.0 * theta;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    spectrum[i] /= base + slope * comp[i];
  }
  auto values = fft::backward_c2r(std::move(spectrum), lattice);
  const double inv_n = 1.0 / static_cast<double>(lattice.size());
  for (double& v : values) v *= inv_n;
  return RealGrid(lattice, std::move(values));
}

void pairwise_reduce(std::vector<RealGrid>& grids) {
  for (std::size_t stride = 1; stride < grids.size(); stride *= 2) {
    for (std::size_t i = 0; i + stride < grids.size(); i += 2 * stride) {
      auto dst = grids[i].values();
      auto src = grids[i + stride].values();
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
    }
  }
}

}  // namespace

std::string provenance_kind(const Provenance& p) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SingleTheta>) return "single_theta";
        if constexpr (std::is_same_v<T, AggregateOf>) return "aggregate";
        return "limit";
      },
      p);
}

RealGrid white_noise(LatticeSpec lattice, double sigma2, std::uint64_t seed) {
  lattice.validate();
  auto engine = rng::make_engine(seed, 0, rng::Stream::noise);
  std::normal_distribution<double> normal(0.0, std::sqrt(sigma2));
  RealGrid grid(lattice);
  for (double& v : grid.values()) v = normal(engine);
  return grid;
}

RealGrid apply_ar_operator(const RealGrid& x, double theta) {
  RealGrid out(x.lattice());
  for (int i = 0; i < x.n1(); ++i) {
    for (int j = 0; j < x.n2(); ++j) {
      const double neighbours = x.wrapped(i - 1, j) + x.wrapped(i + 1, j) +
                                x.wrapped(i, j - 1) + x.wrapped(i, j + 1);
      out(i, j) = x(i, j) - theta * neighbours;
    }
  }
  return out;
}

FieldRealization simulate_ar_field(double theta, LatticeSpec lattice,
                                   double sigma2_eps, std::uint64_t seed) {
  check_stationary(theta);
  lattice.validate();
  if (!(sigma2_eps > 0.0)) throw OutOfRange("sigma2_eps must be > 0");
  const SymbolTable table(lattice);
  return FieldRealization{
      solve_on_torus(theta, white_noise(lattice, sigma2_eps, seed), table),
      SingleTheta{theta}, seed, sigma2_eps, {}};
}

std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t n) {
  return rng::derive_seed(seed, n, rng::Stream::replicate);
}

std::vector<double> aggregate_thetas(const ThetaLaw& law, std::uint64_t seed,
                                     int count) {
  return sample_theta(law, rng::derive_seed(seed, 0, rng::Stream::theta),
                      static_cast<std::size_t>(count));
}

FieldRealization aggregate_field(const ThetaLaw& law, int count,
                                 LatticeSpec lattice, double sigma2_eps,
                                 std::uint64_t seed) {
  if (count < 1) throw OutOfRange("aggregate_field: N must be >= 1");
  lattice.validate();
  if (!(sigma2_eps > 0.0)) throw OutOfRange("sigma2_eps must be > 0");

  FieldRealization out{RealGrid(lattice), AggregateOf{count, law}, seed,
                       sigma2_eps, {}};
  if (law.alpha() <= 0.0) {
    out.warnings.push_back(
        "alpha <= 0: the aggregated field has no L2 limit; the variance of the "
        "aggregate grows without bound as N increases");
  }

  const auto thetas = aggregate_thetas(law, seed, count);
  const SymbolTable table(lattice);

  std::vector<RealGrid> block_sums;
  for (int start = 0; start < count; start += kBlock) {
    const int len = std::min(kBlock, count - start);
    std::vector<RealGrid> block(static_cast<std::size_t>(len));
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < len; ++r) {
      const int n = start + r;
      const auto noise = white_noise(lattice, sigma2_eps, replicate_seed(seed, n));
      block[r] = solve_on_torus(thetas[n], noise, table);
    }
    pairwise_reduce(block);
    block_sums.push_back(std::move(block.front()));
  }
  pairwise_reduce(block_sums);

  out.values = std::move(block_sums.front());
  const double scale = 1.0 / std::sqrt(static_cast<double>(count));
  for (double& v : out.values.values()) v *= scale;
  return out;
}

SpectralSynthesis synthesize_from_spectrum(const RealGrid& f_values,
                                           std::uint64_t seed) {
  const LatticeSpec lattice = f_values.lattice();
  auto engine = rng::make_engine(seed, 0, rng::Stream::spectrum);
  std::normal_distribution<double> normal(0.0, 1.0);
  RealGrid noise(lattice);
  for (double& v : noise.values()) v = normal(engine);

  // FFT of real white noise is Hermitian by construction; scaling by a real
  // even weight keeps it Hermitian, so the inverse is real up to round-off.
  auto spectrum = fft::forward_real(noise.values(), lattice);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const auto f = f_values.values();
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    spectrum[i] *= two_pi * std::sqrt(f[i]);
  }
  spectrum[0] = 0.0;

  const auto field = fft::backward(spectrum, lattice);
  const double inv_n = 1.0 / static_cast<double>(lattice.size());
  SpectralSynthesis out{RealGrid(lattice), 0.0};
  auto values = out.values.values();
  for (std::size_t i = 0; i < field.size(); ++i) {
    values[i] = field[i].real() * inv_n;
    out.max_abs_imag = std::max(out.max_abs_imag, std::abs(field[i].imag() * inv_n));
  }
  return out;
}

FieldRealization limit_field_from_grid(const ThetaLaw& law,
                                       const RealGrid& f_values,
                                       double sigma2_eps, std::uint64_t seed) {
  if (!(law.alpha() > 0.0)) {
    throw NonExistence("the aggregated limit field exists only for alpha > 0");
  }
  auto synth = synthesize_from_spectrum(f_values, seed);
  return FieldRealization{std::move(synth.values), LimitOf{law}, seed,
                          sigma2_eps, {}};
}

FieldRealization simulate_limit_field(const ThetaLaw& law, LatticeSpec lattice,
                                      double sigma2_eps, std::uint64_t seed,
                                      const QuadratureConfig& quad) {
  if (!(law.alpha() > 0.0)) {
    throw NonExistence("the aggregated limit field exists only for alpha > 0");
  }
  const SpectralModel model{law, sigma2_eps};
  return limit_field_from_grid(law, f_grid(model, lattice, quad), sigma2_eps, seed);
}

}  // namespace aggfield
