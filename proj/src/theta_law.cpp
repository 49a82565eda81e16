#include "aggfield/theta_law.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "aggfield/errors.hpp"
#include "aggfield/rng.hpp"

namespace aggfield {

std::string to_string(SupportSign sign) {
  return sign == SupportSign::positive ? "positive" : "mirrored";
}

SupportSign support_from_string(const std::string& name) {
  if (name == "positive") return SupportSign::positive;
  if (name == "mirrored") return SupportSign::mirrored;
  throw std::invalid_argument("support must be \"positive\" or \"mirrored\", got \"" +
                              name + "\"");
}

namespace {

constexpr int kShapeSamples = 4097;

void validate_shape(const PhiSpec& phi) {
  if (phi.coeffs.empty()) {
    throw InvalidShape("phi: coefficient list is empty");
  }
  for (double c : phi.coeffs) {
    if (!std::isfinite(c)) throw InvalidShape("phi: non-finite coefficient");
  }
  double scale = 0.0;
  for (int i = 0; i < kShapeSamples; ++i) {
    const double x = 0.25 * i / (kShapeSamples - 1);
    const double v = phi(x);
    if (v < 0.0) {
      std::ostringstream msg;
      msg << "phi is negative on the support (phi(" << x << ") = " << v << ")";
      throw InvalidShape(msg.str());
    }
    scale = std::max(scale, v);
  }
  const double at_quarter = phi(0.25);
  if (!(at_quarter > 1e-14 * scale) || at_quarter == 0.0) {
    throw InvalidShape("phi(1/4) must be nonzero");
  }
}

// Mass of z = 1/4 - |theta| on [0, z_hi] before normalization, integrand
// z^alpha * phi(1/4 - z). For alpha < 0 the substitution t = z^(alpha+1)
// turns z^alpha dz into dt / (alpha + 1) and removes the singularity.
double unnormalized_mass(double alpha, const PhiSpec& phi, double z_hi,
                         const QuadratureConfig& quad) {
  if (alpha < 0.0) {
    const double p = alpha + 1.0;
    const double t_hi = std::pow(z_hi, p);
    return integrate(
        [&](double t) { return phi(0.25 - std::pow(t, 1.0 / p)) / p; }, 0.0,
        t_hi, quad);
  }
  return integrate(
      [&](double z) { return std::pow(z, alpha) * phi(0.25 - z); }, 0.0, z_hi,
      quad);
}

}  // namespace

ThetaLaw ThetaLaw::make(double alpha, PhiSpec phi, SupportSign support,
                        const QuadratureConfig& quad) {
  if (!(alpha > -1.0) || !std::isfinite(alpha)) {
    std::ostringstream msg;
    msg << "alpha must satisfy alpha > -1 (got " << alpha << ")";
    throw InvalidExponent(msg.str());
  }
  validate_shape(phi);
  quad.validate();

  ThetaLaw law;
  law.alpha_ = alpha;
  law.phi_ = std::move(phi);
  law.support_ = support;
  law.norm_ = 1.0 / unnormalized_mass(alpha, law.phi_, 0.25, quad);

  // Cumulative table on a uniform grid in t = z^(alpha+1): for constant phi
  // the mass is exactly linear in t, so linear interpolation is exact there
  // and monotone in general.
  auto table = std::make_shared<CdfTable>();
  const double p = alpha + 1.0;
  const double t_max = std::pow(0.25, p);
  table->t.resize(kCdfKnots + 1);
  table->mass.resize(kCdfKnots + 1);
  table->t[0] = 0.0;
  table->mass[0] = 0.0;
  const auto& shape = law.phi_;
  double acc = 0.0;
  for (int i = 1; i <= kCdfKnots; ++i) {
    const double t0 = t_max * (i - 1) / kCdfKnots;
    const double t1 = t_max * i / kCdfKnots;
    acc += integrate_gauss_kronrod(
               [&](double t) { return shape(0.25 - std::pow(t, 1.0 / p)) / p; },
               t0, t1, quad)
               .value;
    table->t[i] = t1;
    table->mass[i] = acc;
  }
  for (double& m : table->mass) m /= acc;
  table->mass.back() = 1.0;
  law.table_ = std::move(table);
  return law;
}

double ThetaLaw::density(double x) const {
  const double y = support_ == SupportSign::positive ? x : -x;
  if (!(y >= 0.0 && y < 0.25)) return 0.0;
  return norm_ * phi_(y) * std::pow(0.25 - y, alpha_);
}

double ThetaLaw::z_from_mass(double u) const {
  const auto& t = table_->t;
  const auto& m = table_->mass;
  auto it = std::upper_bound(m.begin(), m.end(), u);
  std::size_t hi = static_cast<std::size_t>(it - m.begin());
  hi = std::clamp<std::size_t>(hi, 1, m.size() - 1);
  const std::size_t lo = hi - 1;
  const double span = m[hi] - m[lo];
  const double w = span > 0.0 ? (u - m[lo]) / span : 0.0;
  const double tt = t[lo] + w * (t[hi] - t[lo]);
  return std::pow(tt, 1.0 / (alpha_ + 1.0));
}

double ThetaLaw::mass_below_z(double z) const {
  if (z <= 0.0) return 0.0;
  if (z >= 0.25) return 1.0;
  const auto& t = table_->t;
  const auto& m = table_->mass;
  const double tz = std::pow(z, alpha_ + 1.0);
  auto it = std::upper_bound(t.begin(), t.end(), tz);
  std::size_t hi = std::clamp<std::size_t>(
      static_cast<std::size_t>(it - t.begin()), 1, t.size() - 1);
  const std::size_t lo = hi - 1;
  const double w = (tz - t[lo]) / (t[hi] - t[lo]);
  return m[lo] + w * (m[hi] - m[lo]);
}

double ThetaLaw::cdf(double x) const {
  // For the positive law theta = 1/4 - z, so P(theta <= x) = P(z >= 1/4 - x).
  auto positive_cdf = [this](double y) {
    if (y < 0.0) return 0.0;
    if (y >= 0.25) return 1.0;
    return 1.0 - mass_below_z(0.25 - y);
  };
  if (support_ == SupportSign::positive) return positive_cdf(x);
  return 1.0 - positive_cdf(-x);
}

std::vector<double> ThetaLaw::sample(std::uint64_t seed,
                                     std::size_t count) const {
  auto engine = rng::make_engine(seed, 0, rng::Stream::theta);
  std::vector<double> out(count);
  constexpr double below_quarter = 0.25 - 0x1.0p-55;
  for (double& x : out) {
    const double z = z_from_mass(rng::uniform_open01(engine));
    double y = 0.25 - z;
    y = std::clamp(y, 0.0, below_quarter);
    x = support_ == SupportSign::positive ? y : -y;
  }
  return out;
}

std::vector<double> sample_theta(const ThetaLaw& law, std::uint64_t seed,
                                 std::size_t count) {
  if (count < 1) throw OutOfRange("sample_theta: count must be >= 1");
  return law.sample(seed, count);
}

}  // namespace aggfield
