#include "aggfield/grid_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "aggfield/errors.hpp"

namespace aggfield::io {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

void write_raw_grid(const fs::path& path, const RealGrid& grid) {
  auto out = open_out(path, std::ios::binary);
  std::vector<unsigned char> bytes(grid.size() * 8);
  std::size_t pos = 0;
  for (double v : grid.values()) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) bytes[pos++] = static_cast<unsigned char>(bits >> (8 * b));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed: " + path.string());
}

RealGrid read_raw_grid(const fs::path& path, LatticeSpec lattice) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() != lattice.size() * 8) {
    std::ostringstream msg;
    msg << path.string() << ": expected " << lattice.size() * 8 << " bytes for a "
        << lattice.n1 << "x" << lattice.n2 << " grid, found " << bytes.size();
    throw FormatError(msg.str());
  }
  RealGrid grid(lattice);
  std::size_t pos = 0;
  for (double& v : grid.values()) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[pos++]) << (8 * b);
    v = std::bit_cast<double>(bits);
  }
  return grid;
}

fs::path raw_path(const fs::path& prefix) {
  fs::path p = prefix;
  p += ".f64";
  return p;
}

fs::path sidecar_path(const fs::path& prefix) {
  fs::path p = prefix;
  p += ".json";
  return p;
}

void write_grid_with_sidecar(const fs::path& prefix, const RealGrid& grid, json meta) {
  meta["format"] = kSidecarFormat;
  meta["n1"] = grid.n1();
  meta["n2"] = grid.n2();
  meta["encoding"] = kRawEncoding;
  write_raw_grid(raw_path(prefix), grid);
  write_json(sidecar_path(prefix), meta);
}

GridFile read_grid_with_sidecar(const fs::path& any) {
  fs::path prefix = any;
  if (any.extension() == ".f64" || any.extension() == ".json") {
    prefix = any.parent_path() / any.stem();
  }
  const json meta = read_json(sidecar_path(prefix));
  if (!meta.is_object() || meta.value("format", "") != kSidecarFormat) {
    throw FormatError(sidecar_path(prefix).string() + ": not an aggfield sidecar");
  }
  if (!meta.contains("n1") || !meta.contains("n2") || !meta["n1"].is_number_integer() ||
      !meta["n2"].is_number_integer()) {
    throw FormatError(sidecar_path(prefix).string() + ": missing integer n1/n2");
  }
  if (meta.value("encoding", "") != kRawEncoding) {
    throw FormatError(sidecar_path(prefix).string() + ": encoding is not " + kRawEncoding);
  }
  const LatticeSpec lattice{meta["n1"].get<int>(), meta["n2"].get<int>()};
  if (lattice.n1 < 2 || lattice.n2 < 2) {
    throw FormatError(sidecar_path(prefix).string() + ": n1 and n2 must be >= 2");
  }
  return GridFile{read_raw_grid(raw_path(prefix), lattice), meta};
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line:column for the message.
    const std::size_t offset = std::min<std::size_t>(e.byte, text.size());
    int line = 1;
    int column = 1;
    for (std::size_t i = 0; i + 1 < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream msg;
    msg << path.string() << ":" << line << ":" << column << ": JSON syntax error";
    throw FormatError(msg.str());
  }
}

void write_json(const fs::path& path, const json& value) {
  auto out = open_out(path);
  out << value.dump(2) << "\n";
}

json law_to_json(const ThetaLaw& law) {
  json phi;
  if (law.phi().kind == PhiSpec::Kind::constant) {
    phi = {{"kind", "constant"}, {"value", law.phi().coeffs.front()}};
  } else {
    phi = {{"kind", "poly"}, {"coeffs", law.phi().coeffs}};
  }
  return json{{"alpha", law.alpha()},
              {"phi", phi},
              {"support", to_string(law.support())},
              {"norm_constant", law.norm_constant()}};
}

json provenance_to_json(const Provenance& p) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SingleTheta>) {
          return {{"kind", "single_theta"}, {"theta", v.theta}};
        } else if constexpr (std::is_same_v<T, AggregateOf>) {
          return {{"kind", "aggregate"}, {"N", v.count}, {"law", law_to_json(v.law)}};
        } else {
          return {{"kind", "limit"}, {"law", law_to_json(v.law)}};
        }
      },
      p);
}

json field_sidecar(const FieldRealization& field) {
  json meta{{"provenance", provenance_to_json(field.provenance)},
            {"seed", field.seed},
            {"sigma2", field.sigma2_eps}};
  if (!field.warnings.empty()) meta["warnings"] = field.warnings;
  return meta;
}

void write_field_csv(const fs::path& path, const RealGrid& grid) {
  auto out = open_out(path);
  out << "i,j,value\n";
  for (int i = 0; i < grid.n1(); ++i) {
    for (int j = 0; j < grid.n2(); ++j) {
      out << i << "," << j << "," << format_double(grid(i, j)) << "\n";
    }
  }
}

void write_radial_csv(const fs::path& path, const RadialSpectrum& rad) {
  auto out = open_out(path);
  out << "bin,r_lo,r_hi,mean_radius,mean_ordinate,count\n";
  for (std::size_t i = 0; i < rad.count.size(); ++i) {
    out << i << "," << format_double(rad.bin_edges[i]) << ","
        << format_double(rad.bin_edges[i + 1]) << "," << format_double(rad.mean_radius[i])
        << "," << format_double(rad.mean_ordinate[i]) << "," << rad.count[i] << "\n";
  }
}

json radial_to_json(const RadialSpectrum& rad) {
  return json{{"bin_edges", rad.bin_edges},
              {"mean_radius", rad.mean_radius},
              {"mean_ordinate", rad.mean_ordinate},
              {"count", rad.count}};
}

json report_to_json(const MemoryReport& report) {
  auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return json{{"slope", report.slope},
              {"intercept", report.intercept},
              {"alpha_hat", report.alpha_hat},
              {"stderr", report.stderr_slope},
              {"fit_range", {report.fit_range.r_min, report.fit_range.r_max}},
              {"bins_used", report.bins_used},
              {"rss_power", report.rss_power},
              {"rss_log", finite_or_null(report.rss_log)},
              {"log_coefficient", report.log_coefficient},
              {"classification", to_string(report.classification)}};
}

void write_report_csv(const fs::path& path, const MemoryReport& report) {
  auto out = open_out(path);
  out << "slope,alpha_hat,stderr,r_min,r_max,bins_used,rss_power,rss_log,classification\n";
  out << format_double(report.slope) << "," << format_double(report.alpha_hat) << ","
      << format_double(report.stderr_slope) << "," << format_double(report.fit_range.r_min)
      << "," << format_double(report.fit_range.r_max) << "," << report.bins_used << ","
      << format_double(report.rss_power) << "," << format_double(report.rss_log) << ","
      << to_string(report.classification) << "\n";
}

}  // namespace aggfield::io
