#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aggfield/errors.hpp"
#include "aggfield/grid.hpp"
#include "aggfield/memory_analysis.hpp"
#include "aggfield/quadrature.hpp"
#include "aggfield/theta_law.hpp"

namespace aggfield {

/// Configuration problem, reported with the JSON path of the offending field.
class ConfigError : public FormatError {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : FormatError(field + ": " + message), field_(field) {}
  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct LawConfig {
  double alpha{0.5};
  PhiSpec phi{};
  SupportSign support{SupportSign::positive};
};

struct SpectralSection {
  std::string format{"csv"};  ///< "csv" or "raw"
  /// Evaluate along lambda = t * direction instead of on the lattice grid.
  std::vector<double> line_t;
  std::array<double, 2> direction{1.0, 1.0};
};

struct SimulateSection {
  std::string mode{"limit"};  ///< "single", "aggregate" or "limit"
  std::optional<double> theta;
  std::optional<int> count;  ///< N for aggregate mode
  int replicates{1};
  std::string format{"raw"};  ///< "raw" or "csv"
};

struct AnalyzeSection {
  int n_bins{32};
  std::optional<FitRange> fit_range;
  std::vector<std::string> inputs;
};

struct VerifySection {
  std::vector<double> alphas{0.25, 0.5, 0.75, 1.0, 2.0};
  int route_samples{200};
};

/// Everything a command needs. Built from a JSON document whose schema is
/// given in the README; unknown keys are rejected.
struct ExperimentConfig {
  LawConfig law{};
  double sigma2_eps{1.0};
  LatticeSpec lattice{64, 64};
  std::uint64_t seed{0};
  QuadratureConfig quadrature{};
  int workers{1};
  SpectralSection spectral{};
  SimulateSection simulate{};
  AnalyzeSection analyze{};
  VerifySection verify{};

  static ExperimentConfig from_json(const nlohmann::json& doc);
  [[nodiscard]] nlohmann::json to_json() const;

  /// Builds the coefficient law (validating alpha and phi).
  [[nodiscard]] ThetaLaw make_law() const;
  /// Checks every precondition that does not depend on the command.
  void validate() const;
};

/// Reads a config file, or the "config" member of an output sidecar.
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace aggfield
