#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "aggfield/field_sim.hpp"
#include "aggfield/grid.hpp"
#include "aggfield/memory_analysis.hpp"
#include "aggfield/theta_law.hpp"

namespace aggfield::io {

using nlohmann::json;

inline constexpr const char* kSidecarFormat = "aggfield-sidecar";
inline constexpr const char* kRawEncoding = "float64-le-row-major";

/// Raw grid: n1 * n2 little-endian IEEE-754 doubles, row-major, no header.
void write_raw_grid(const std::filesystem::path& path, const RealGrid& grid);
/// Throws FormatError when the byte count does not match the lattice.
RealGrid read_raw_grid(const std::filesystem::path& path, LatticeSpec lattice);

/// <stem>.f64 and <stem>.json for an output prefix.
std::filesystem::path raw_path(const std::filesystem::path& prefix);
std::filesystem::path sidecar_path(const std::filesystem::path& prefix);

/// Writes the raw grid and a sidecar holding `meta` plus n1, n2 and the
/// sidecar format tag.
void write_grid_with_sidecar(const std::filesystem::path& prefix,
                             const RealGrid& grid, json meta);

struct GridFile {
  RealGrid grid;
  json sidecar;
};
/// Accepts the prefix, the .f64 path or the .json path.
GridFile read_grid_with_sidecar(const std::filesystem::path& any);

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& value);

json law_to_json(const ThetaLaw& law);
json provenance_to_json(const Provenance& p);
json field_sidecar(const FieldRealization& field);

void write_field_csv(const std::filesystem::path& path, const RealGrid& grid);
void write_radial_csv(const std::filesystem::path& path, const RadialSpectrum& rad);
json radial_to_json(const RadialSpectrum& rad);
json report_to_json(const MemoryReport& report);
void write_report_csv(const std::filesystem::path& path, const MemoryReport& report);

/// Shortest text that round-trips the double; "inf", "-inf" and "nan" for
/// non-finite values.
std::string format_double(double v);

}  // namespace aggfield::io
