#include "aggfield/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "aggfield/config.hpp"
#include "aggfield/errors.hpp"
#include "aggfield/field_sim.hpp"
#include "aggfield/grid_io.hpp"
#include "aggfield/memory_analysis.hpp"
#include "aggfield/rng.hpp"
#include "aggfield/spectral.hpp"
#include "aggfield/verify.hpp"

namespace aggfield {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<int> n1;
  std::optional<int> n2;
  std::optional<std::string> mode;
  std::string out{"aggfield_out"};
  std::vector<std::string> inputs;
};

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.workers) cfg.workers = *o.workers;
  if (o.n1) cfg.lattice.n1 = *o.n1;
  if (o.n2) cfg.lattice.n2 = *o.n2;
  if (o.mode) cfg.simulate.mode = *o.mode;
  cfg.validate();
#ifdef _OPENMP
  omp_set_num_threads(cfg.workers);
#endif
  return cfg;
}

std::ofstream open_text(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::out | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

fs::path with_suffix(const fs::path& prefix, const std::string& suffix) {
  return prefix.string() + suffix;
}

int cmd_spectral(const ExperimentConfig& cfg, const fs::path& prefix, std::ostream& out) {
  const SpectralModel model{cfg.make_law(), cfg.sigma2_eps};
  const bool has_asymptote = cfg.law.alpha > 0.0 && cfg.law.alpha <= 1.0;
  json meta{{"kind", "spectral_density"}, {"config", cfg.to_json()}};

  if (!cfg.spectral.line_t.empty()) {
    const auto path = with_suffix(prefix, ".csv");
    auto csv = open_text(path);
    csv << "t,lambda1,lambda2,f";
    if (has_asymptote) csv << ",asymptote,ratio";
    csv << "\n";
    for (const double t : cfg.spectral.line_t) {
      const Frequency f{t * cfg.spectral.direction[0], t * cfg.spectral.direction[1]};
      double value = INFINITY;
      try {
        value = spectral_density(model, f, cfg.quadrature);
      } catch (const Divergence&) {
      }
      csv << io::format_double(t) << "," << io::format_double(f.lambda1) << ","
          << io::format_double(f.lambda2) << "," << io::format_double(value);
      if (has_asymptote) {
        const double a = asymptote(model, f);
        csv << "," << io::format_double(a) << "," << io::format_double(value / a);
      }
      csv << "\n";
    }
    meta["columns"] = has_asymptote ? json{"t", "lambda1", "lambda2", "f", "asymptote", "ratio"}
                                    : json{"t", "lambda1", "lambda2", "f"};
    io::write_json(io::sidecar_path(prefix), meta);
    out << "wrote " << path.string() << "\n";
    return kExitOk;
  }

  const RealGrid grid = f_grid(model, cfg.lattice, cfg.quadrature);
  meta["dc_policy"] = kDcPolicy;
  meta["frequency_layout"] = "bin (k1, k2) at 2 pi k / n mapped to (-pi, pi]";
  if (cfg.spectral.format == "raw") {
    io::write_grid_with_sidecar(prefix, grid, meta);
    out << "wrote " << io::raw_path(prefix).string() << "\n";
    return kExitOk;
  }
  const auto path = with_suffix(prefix, ".csv");
  auto csv = open_text(path);
  csv << "k1,k2,lambda1,lambda2,f\n";
  for (int i = 0; i < grid.n1(); ++i) {
    for (int j = 0; j < grid.n2(); ++j) {
      const Frequency f = fourier_frequency(i, j, cfg.lattice);
      csv << i << "," << j << "," << io::format_double(f.lambda1) << ","
          << io::format_double(f.lambda2) << "," << io::format_double(grid(i, j)) << "\n";
    }
  }
  io::write_json(io::sidecar_path(prefix), meta);
  out << "wrote " << path.string() << "\n";
  return kExitOk;
}

FieldRealization simulate_one(const ExperimentConfig& cfg, const ThetaLaw& law,
                              const RealGrid* f_values, std::uint64_t seed) {
  const auto& mode = cfg.simulate.mode;
  if (mode == "single") {
    return simulate_ar_field(*cfg.simulate.theta, cfg.lattice, cfg.sigma2_eps, seed);
  }
  if (mode == "aggregate") {
    return aggregate_field(law, *cfg.simulate.count, cfg.lattice, cfg.sigma2_eps, seed);
  }
  return limit_field_from_grid(law, *f_values, cfg.sigma2_eps, seed);
}

int cmd_simulate(const ExperimentConfig& cfg, const fs::path& prefix, std::ostream& out,
                 std::ostream& err) {
  const auto& sim = cfg.simulate;
  if (sim.mode == "single") {
    if (!sim.theta) throw ConfigError("simulate.theta", "required for mode \"single\"");
    if (!(std::abs(*sim.theta) < 0.25)) {
      throw NonStationary("theta must satisfy |theta| < 1/4 for a stationary solution");
    }
  }
  if (sim.mode == "aggregate") {
    if (!sim.count) throw ConfigError("simulate.N", "required for mode \"aggregate\"");
    if (*sim.count < 1) throw ConfigError("simulate.N", "must be >= 1");
  }
  const ThetaLaw law = cfg.make_law();
  std::optional<RealGrid> f_values;
  if (sim.mode == "limit") {
    if (!(law.alpha() > 0.0)) {
      throw NonExistence("the limit field requires alpha > 0 (aggregated variance is infinite)");
    }
    f_values = f_grid(SpectralModel{law, cfg.sigma2_eps}, cfg.lattice, cfg.quadrature);
  }

  for (int r = 0; r < sim.replicates; ++r) {
    const std::uint64_t seed =
        sim.replicates == 1 ? cfg.seed
                            : rng::derive_seed(cfg.seed, static_cast<std::uint64_t>(r),
                                               rng::Stream::replicate);
    const FieldRealization field =
        simulate_one(cfg, law, f_values ? &*f_values : nullptr, seed);
    for (const auto& w : field.warnings) err << "warning: " << w << "\n";

    fs::path file_prefix = prefix;
    if (sim.replicates > 1) {
      char tag[16];
      std::snprintf(tag, sizeof tag, "_%04d", r);
      file_prefix = with_suffix(prefix, tag);
    }
    json meta = io::field_sidecar(field);
    meta["kind"] = "field";
    meta["replicate"] = r;
    meta["config"] = cfg.to_json();
    if (sim.format == "raw") {
      io::write_grid_with_sidecar(file_prefix, field.values, meta);
      out << "wrote " << io::raw_path(file_prefix).string() << "\n";
    } else {
      const auto path = with_suffix(file_prefix, ".csv");
      io::write_field_csv(path, field.values);
      meta["format"] = io::kSidecarFormat;
      meta["encoding"] = "csv";
      meta["n1"] = cfg.lattice.n1;
      meta["n2"] = cfg.lattice.n2;
      io::write_json(io::sidecar_path(file_prefix), meta);
      out << "wrote " << path.string() << "\n";
    }
  }
  return kExitOk;
}

int cmd_analyze(const ExperimentConfig& cfg, const std::vector<std::string>& inputs,
                const fs::path& prefix, std::ostream& out) {
  if (inputs.empty()) {
    throw ConfigError("analyze.inputs", "no input field files given (insufficient data)");
  }
  PeriodogramAverager avg;
  std::optional<LatticeSpec> lattice;
  for (const auto& in : inputs) {
    const auto file = io::read_grid_with_sidecar(in);
    if (lattice && !(file.grid.lattice() == *lattice)) {
      throw FormatError(in + ": lattice " + std::to_string(file.grid.n1()) + "x" +
                        std::to_string(file.grid.n2()) + " differs from the first input");
    }
    lattice = file.grid.lattice();
    avg.add(file.grid);
  }
  const PeriodogramEstimate mean = avg.mean();
  const RadialSpectrum rad = radial_average(mean, cfg.analyze.n_bins);
  const FitRange range = cfg.analyze.fit_range.value_or(default_fit_range(*lattice));

  json base{{"inputs", inputs}, {"replicates", mean.replicates}, {"config", cfg.to_json()}};
  json pmeta = base;
  pmeta["kind"] = "mean_periodogram";
  io::write_grid_with_sidecar(with_suffix(prefix, "_periodogram"), mean.ordinates, pmeta);

  const Autocovariance acov = autocovariance_from_spectrum(mean.ordinates);
  json ameta = base;
  ameta["kind"] = "sample_autocovariance";
  ameta["layout"] = "gamma(h) at (h1 mod n1, h2 mod n2)";
  io::write_grid_with_sidecar(with_suffix(prefix, "_acov"), acov.gamma, ameta);

  io::write_radial_csv(with_suffix(prefix, "_radial.csv"), rad);
  io::write_json(with_suffix(prefix, "_radial.json"), io::radial_to_json(rad));

  const MemoryReport report = estimate_memory(rad, range);
  json rjson = io::report_to_json(report);
  rjson["replicates"] = mean.replicates;
  io::write_json(with_suffix(prefix, "_report.json"), rjson);
  io::write_report_csv(with_suffix(prefix, "_report.csv"), report);

  out << "replicates " << mean.replicates << "  slope " << io::format_double(report.slope)
      << "  alpha_hat " << io::format_double(report.alpha_hat) << "  classification "
      << to_string(report.classification) << "\n";
  return kExitOk;
}

int cmd_verify(const ExperimentConfig& cfg, std::ostream& out) {
  VerifyOptions opts;
  opts.alphas = cfg.verify.alphas;
  opts.route_samples = cfg.verify.route_samples;
  opts.sigma2_eps = cfg.sigma2_eps;
  opts.seed = cfg.seed;
  opts.quad = cfg.quadrature;
  const auto results = run_verification(opts);
  print_verification_table(out, results);
  const bool ok = all_passed(results);
  out << (ok ? "all checks passed" : "some checks FAILED") << "\n";
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Aggregated four-neighbour random fields on the square lattice", "aggfield"};
  app.require_subcommand(1);
  Overrides o;

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON config file or output sidecar")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "override config seed");
    sub->add_option("--workers", o.workers, "worker threads");
    sub->add_option("--n1", o.n1, "override lattice.n1");
    sub->add_option("--n2", o.n2, "override lattice.n2");
  };
  auto* spectral = app.add_subcommand("spectral", "evaluate the spectral density");
  add_common(spectral);
  spectral->add_option("--out", o.out, "output prefix");
  auto* simulate = app.add_subcommand("simulate", "synthesize fields");
  add_common(simulate);
  simulate->add_option("--out", o.out, "output prefix");
  simulate->add_option("--mode", o.mode, "single, aggregate or limit")
      ->check(CLI::IsMember({"single", "aggregate", "limit"}));
  auto* analyze = app.add_subcommand("analyze", "periodogram and memory report");
  add_common(analyze);
  analyze->add_option("--out", o.out, "output prefix");
  analyze->add_option("inputs", o.inputs, "field files (prefix, .f64 or .json)");
  auto* verify = app.add_subcommand("verify", "run the numerical self-check battery");
  add_common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const ExperimentConfig cfg = resolve(o);
    if (*spectral) return cmd_spectral(cfg, o.out, out);
    if (*simulate) return cmd_simulate(cfg, o.out, out, err);
    if (*analyze) {
      std::vector<std::string> inputs = cfg.analyze.inputs;
      inputs.insert(inputs.end(), o.inputs.begin(), o.inputs.end());
      return cmd_analyze(cfg, inputs, o.out, out);
    }
    return cmd_verify(cfg, out);
  } catch (const ModelError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InsufficientData& e) {
    err << "error: insufficient data: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace aggfield
