#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "aggfield/cli.hpp"
#include "aggfield/grid_io.hpp"

using namespace aggfield;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "aggfield");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path dir() {
  static const fs::path d = [] {
    const fs::path p = fs::temp_directory_path() / "aggfield_test_cli";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return d;
}

std::string write_config(const std::string& name, const std::string& body) {
  const fs::path p = dir() / name;
  std::ofstream(p) << body;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string out_prefix(const std::string& name) { return (dir() / name).string(); }

}  // namespace

TEST_CASE("spectral along a line") {
  const auto cfg = write_config("line.json", R"({"law": {"alpha": 0.5},
    "spectral": {"line_t": [1e-1, 1e-2, 1e-3, 1e-4]}})");
  const auto r = run({"spectral", "--config", cfg, "--out", out_prefix("line")});
  REQUIRE(r.code == 0);
  const auto rows = read_csv(out_prefix("line") + ".csv");
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == std::vector<std::string>{"t", "lambda1", "lambda2", "f", "asymptote", "ratio"});
  double prev = 1.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double err = std::abs(std::stod(rows[i][5]) - 1.0);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-3);

  const auto cfg2 = write_config("line2.json", R"({"law": {"alpha": 2},
    "spectral": {"line_t": [0, 1e-2]}})");
  REQUIRE(run({"spectral", "--config", cfg2, "--out", out_prefix("line2")}).code == 0);
  const auto rows2 = read_csv(out_prefix("line2") + ".csv");
  CHECK(rows2[0].size() == 4);
  CHECK(std::stod(rows2[1][3]) == doctest::Approx(3.0 / (4.0 * M_PI * M_PI)));
}

TEST_CASE("spectral grid outputs") {
  const auto cfg = write_config("grid.json", R"({"law": {"alpha": 0.5}, "lattice": {"n1": 8, "n2": 6},
    "spectral": {"format": "raw"}})");
  REQUIRE(run({"spectral", "--config", cfg, "--out", out_prefix("fgrid")}).code == 0);
  const auto file = io::read_grid_with_sidecar(out_prefix("fgrid"));
  CHECK(file.grid.n1() == 8);
  CHECK(file.grid(0, 0) == 0.0);
  CHECK(file.sidecar.contains("dc_policy"));
  CHECK(file.sidecar["config"]["law"]["alpha"] == 0.5);

  REQUIRE(run({"spectral", "--config", cfg, "--n1", "4", "--n2", "4", "--out", out_prefix("small")}).code == 0);
  CHECK(io::read_json(out_prefix("small") + ".json")["config"]["lattice"]["n1"] == 4);
  // csv is the default format
  const auto csvcfg = write_config("gridcsv.json", R"({"law": {"alpha": 0.5}, "lattice": {"n1": 4, "n2": 4}})");
  REQUIRE(run({"spectral", "--config", csvcfg, "--out", out_prefix("fcsv2")}).code == 0);
  const auto rows = read_csv(out_prefix("fcsv2") + ".csv");
  CHECK(rows.size() == 17);
  CHECK(rows[0] == std::vector<std::string>{"k1", "k2", "lambda1", "lambda2", "f"});
}

TEST_CASE("usage and validation errors exit 2") {
  const auto bad = write_config("bad.json", R"({"law": {"alpha": -2}})");
  const auto r = run({"spectral", "--config", bad});
  CHECK(r.code == 2);
  CHECK(r.err.find("alpha > -1") != std::string::npos);

  const auto unknown = write_config("unknown.json", R"({"law": {"alpha": 0.5}, "lattice": {"n3": 4}})");
  const auto u = run({"simulate", "--config", unknown});
  CHECK(u.code == 2);
  CHECK(u.err.find("lattice.n3") != std::string::npos);

  const auto nonstat = write_config("ns.json", R"({"law": {"alpha": 0.5}, "lattice": {"n1": 8, "n2": 8},
    "simulate": {"mode": "single", "theta": 0.25}})");
  CHECK(run({"simulate", "--config", nonstat, "--out", out_prefix("ns")}).code == 2);
  CHECK_FALSE(fs::exists(out_prefix("ns") + ".f64"));

  CHECK(run({"simulate", "--mode", "bogus"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"spectral", "--config", (dir() / "nope.json").string()}).code == 2);
  CHECK(run({"--help"}).code == 0);

  const auto noexist = write_config("ne.json", R"({"law": {"alpha": 0}, "lattice": {"n1": 8, "n2": 8}})");
  const auto ne = run({"simulate", "--config", noexist, "--mode", "limit", "--out", out_prefix("ne")});
  CHECK(ne.code == 2);
  CHECK(ne.err.find("alpha > 0") != std::string::npos);
}

TEST_CASE("simulate is byte-deterministic and sidecars reproduce") {
  const auto cfg = write_config("lim.json", R"({"law": {"alpha": 0.5}, "lattice": {"n1": 256, "n2": 256},
    "seed": 5, "simulate": {"mode": "limit"}})");
  REQUIRE(run({"simulate", "--config", cfg, "--out", out_prefix("a/lim")}).code == 0);
  REQUIRE(run({"simulate", "--config", cfg, "--out", out_prefix("b/lim")}).code == 0);
  CHECK(fs::file_size(out_prefix("a/lim") + ".f64") == 256 * 256 * 8);
  CHECK(slurp(out_prefix("a/lim") + ".f64") == slurp(out_prefix("b/lim") + ".f64"));
  CHECK(slurp(out_prefix("a/lim") + ".json") == slurp(out_prefix("b/lim") + ".json"));

  REQUIRE(run({"simulate", "--config", out_prefix("a/lim") + ".json", "--out", out_prefix("c/lim")}).code == 0);
  CHECK(slurp(out_prefix("a/lim") + ".f64") == slurp(out_prefix("c/lim") + ".f64"));

  REQUIRE(run({"simulate", "--config", cfg, "--seed", "6", "--out", out_prefix("d/lim")}).code == 0);
  CHECK(slurp(out_prefix("a/lim") + ".f64") != slurp(out_prefix("d/lim") + ".f64"));

  const auto agg = write_config("agg.json", R"({"law": {"alpha": 0.5}, "lattice": {"n1": 16, "n2": 16},
    "simulate": {"mode": "aggregate", "N": 20, "replicates": 2, "format": "csv"}})");
  REQUIRE(run({"simulate", "--config", agg, "--out", out_prefix("agg/z"), "--workers", "2"}).code == 0);
  CHECK(fs::exists(out_prefix("agg/z") + "_0000.csv"));
  CHECK(fs::exists(out_prefix("agg/z") + "_0001.json"));
  REQUIRE(run({"simulate", "--config", agg, "--out", out_prefix("agg1/z"), "--workers", "1"}).code == 0);
  CHECK(slurp(out_prefix("agg/z") + "_0001.csv") == slurp(out_prefix("agg1/z") + "_0001.csv"));
  // csv fields are not analyzable input
  CHECK(run({"analyze", "--out", out_prefix("agg/rep"), out_prefix("agg/z") + "_0000"}).code == 2);
}

TEST_CASE("analyze") {
  const auto lim = write_config("an.json", R"({"law": {"alpha": 0.5}, "lattice": {"n1": 256, "n2": 256},
    "seed": 1, "simulate": {"mode": "limit", "replicates": 50}})");
  REQUIRE(run({"simulate", "--config", lim, "--out", out_prefix("an/z")}).code == 0);
  std::vector<std::string> args{"analyze", "--out", out_prefix("an/rep")};
  for (int r = 0; r < 50; ++r) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "_%04d.f64", r);
    args.push_back(out_prefix("an/z") + buf);
  }
  const auto res = run(args);
  REQUIRE(res.code == 0);
  const auto report = io::read_json(out_prefix("an/rep") + "_report.json");
  const double alpha_hat = report["alpha_hat"];
  CHECK(alpha_hat >= 0.4);
  CHECK(alpha_hat <= 0.6);
  CHECK(report["classification"] == "long_power");
  CHECK(fs::exists(out_prefix("an/rep") + "_radial.csv"));
  CHECK(fs::exists(out_prefix("an/rep") + "_report.csv"));
  CHECK(io::read_grid_with_sidecar(out_prefix("an/rep") + "_periodogram").sidecar["replicates"] == 50);
  CHECK(io::read_grid_with_sidecar(out_prefix("an/rep") + "_acov").grid.n1() == 256);

  const auto wn = write_config("wn.json", R"({"law": {"alpha": 0.5}, "lattice": {"n1": 128, "n2": 128},
    "simulate": {"mode": "single", "theta": 0, "replicates": 10}})");
  REQUIRE(run({"simulate", "--config", wn, "--out", out_prefix("wn/x")}).code == 0);
  std::vector<std::string> wargs{"analyze", "--out", out_prefix("wn/rep")};
  for (int r = 0; r < 10; ++r) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "_%04d", r);
    wargs.push_back(out_prefix("wn/x") + buf);
  }
  REQUIRE(run(wargs).code == 0);
  CHECK(io::read_json(out_prefix("wn/rep") + "_report.json")["classification"] == "short");

  const auto none = run({"analyze", "--out", out_prefix("none")});
  CHECK(none.code == 2);
  CHECK(none.err.find("insufficient data") != std::string::npos);

  // Too few bins in the fit range is an analysis failure.
  const auto narrow = write_config("narrow.json", R"({"analyze": {"fit_range": [0.3, 0.31]}})");
  const auto nr = run({"analyze", "--config", narrow, "--out", out_prefix("narrow"),
                       out_prefix("wn/x") + "_0000"});
  CHECK(nr.code == 1);
}

TEST_CASE("verify") {
  const auto r = run({"verify"});
  CHECK(r.code == 0);
  CHECK(r.out.find("all checks passed") != std::string::npos);
  const auto tight = write_config("tight.json", R"({"quadrature": {"rel_tol": 1e-12}})");
  CHECK(run({"verify", "--config", tight}).code == 0);
}

TEST_CASE("installed binary") {
  const std::string cmd = std::string(AGGFIELD_CLI_PATH) + " verify > " + (dir() / "v.txt").string();
  CHECK(std::system(cmd.c_str()) == 0);
  const std::string bad = write_config("bad2.json", R"({"law": {"alpha": -2}})");
  const int status = std::system((std::string(AGGFIELD_CLI_PATH) + " spectral --config " + bad + " 2> /dev/null").c_str());
  CHECK(WEXITSTATUS(status) == 2);
}
