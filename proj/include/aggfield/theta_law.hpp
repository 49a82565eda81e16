#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "aggfield/quadrature.hpp"

namespace aggfield {

enum class SupportSign {
  positive,  ///< theta in [0, 1/4)
  mirrored,  ///< theta in (-1/4, 0], density reflected through x -> -x
};

std::string to_string(SupportSign sign);
SupportSign support_from_string(const std::string& name);

/// Shape function phi on [0, 1/4]. A constant is stored as a degree-0
/// polynomial; coefficients are in increasing powers of x.
struct PhiSpec {
  enum class Kind { constant, polynomial };

  Kind kind{Kind::constant};
  std::vector<double> coeffs{1.0};

  static PhiSpec constant(double value = 1.0) {
    return PhiSpec{Kind::constant, {value}};
  }
  static PhiSpec polynomial(std::vector<double> c) {
    return PhiSpec{Kind::polynomial, std::move(c)};
  }

  [[nodiscard]] double operator()(double x) const {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
  }
};

/// Law of the random AR coefficient: density C * phi(|x|) * (1/4 - |x|)^alpha
/// on [0, 1/4) or its mirror image on (-1/4, 0]. Immutable once built; copies
/// share the inverse-CDF table.
class ThetaLaw {
 public:
  static constexpr int kCdfKnots = 4096;

  /// Validates alpha > -1, phi(1/4) != 0 and phi >= 0 on [0, 1/4], then
  /// normalizes and tabulates the inverse CDF.
  static ThetaLaw make(double alpha, PhiSpec phi,
                       SupportSign support = SupportSign::positive,
                       const QuadratureConfig& quad = {});

  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] const PhiSpec& phi() const { return phi_; }
  [[nodiscard]] SupportSign support() const { return support_; }
  [[nodiscard]] double norm_constant() const { return norm_; }

  /// Normalized shape C * phi(y) for y = |theta| in [0, 1/4].
  [[nodiscard]] double full_phi(double y) const { return norm_ * phi_(y); }
  /// C * phi(1/4), the constant that enters the low-frequency asymptotics.
  [[nodiscard]] double phi_at_quarter() const { return full_phi(0.25); }

  /// Density of theta; zero outside the support.
  [[nodiscard]] double density(double x) const;
  /// P(theta <= x), from the tabulated CDF.
  [[nodiscard]] double cdf(double x) const;

  /// count draws by inverse-CDF sampling; a pure function of (seed, count).
  [[nodiscard]] std::vector<double> sample(std::uint64_t seed,
                                           std::size_t count) const;

 private:
  struct CdfTable {
    // Knots in t = z^(alpha+1), z = 1/4 - |theta|; cumulative mass of z at
    // each knot, normalized so the last entry is exactly 1.
    std::vector<double> t;
    std::vector<double> mass;
  };

  ThetaLaw() = default;
  [[nodiscard]] double z_from_mass(double u) const;
  [[nodiscard]] double mass_below_z(double z) const;

  double alpha_{0.0};
  PhiSpec phi_{};
  SupportSign support_{SupportSign::positive};
  double norm_{1.0};
  std::shared_ptr<const CdfTable> table_;
};

inline ThetaLaw make_theta_law(double alpha, PhiSpec phi, SupportSign support,
                               const QuadratureConfig& quad = {}) {
  return ThetaLaw::make(alpha, std::move(phi), support, quad);
}
inline double theta_density(const ThetaLaw& law, double x) {
  return law.density(x);
}
std::vector<double> sample_theta(const ThetaLaw& law, std::uint64_t seed,
                                 std::size_t count);

}  // namespace aggfield
