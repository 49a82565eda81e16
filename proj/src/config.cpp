#include "aggfield/config.hpp"

#include <set>
#include <sstream>

#include "aggfield/grid_io.hpp"

namespace aggfield {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where.empty() ? "<root>" : where, "must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

std::string path_of(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

double get_number(const json& obj, const std::string& where, const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(path_of(where, key), "must be a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& where, const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(path_of(where, key), "must be an integer");
  return v.get<int>();
}

std::string get_string(const json& obj, const std::string& where, const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(path_of(where, key), "must be a string");
  return v.get<std::string>();
}

std::vector<double> get_number_list(const json& obj, const std::string& where,
                                    const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_array()) throw ConfigError(path_of(where, key), "must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(path_of(where, key), "must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

LawConfig parse_law(const json& obj) {
  reject_unknown(obj, "law", {"alpha", "phi", "support"});
  LawConfig law;
  if (!obj.contains("alpha")) throw ConfigError("law.alpha", "required");
  law.alpha = get_number(obj, "law", "alpha");
  if (obj.contains("phi")) {
    const auto& phi = obj["phi"];
    reject_unknown(phi, "law.phi", {"kind", "value", "coeffs"});
    if (!phi.contains("kind")) throw ConfigError("law.phi.kind", "required");
    const std::string kind = get_string(phi, "law.phi", "kind");
    if (kind == "constant") {
      if (phi.contains("coeffs")) throw ConfigError("law.phi.coeffs", "not allowed for kind \"constant\"");
      law.phi = PhiSpec::constant(phi.contains("value") ? get_number(phi, "law.phi", "value") : 1.0);
    } else if (kind == "poly") {
      if (phi.contains("value")) throw ConfigError("law.phi.value", "not allowed for kind \"poly\"");
      if (!phi.contains("coeffs")) throw ConfigError("law.phi.coeffs", "required for kind \"poly\"");
      law.phi = PhiSpec::polynomial(get_number_list(phi, "law.phi", "coeffs"));
    } else {
      throw ConfigError("law.phi.kind", "must be \"constant\" or \"poly\"");
    }
  }
  if (obj.contains("support")) {
    try {
      law.support = support_from_string(get_string(obj, "law", "support"));
    } catch (const std::invalid_argument&) {
      throw ConfigError("law.support", "must be \"positive\" or \"mirrored\"");
    }
  }
  return law;
}

json phi_to_json(const PhiSpec& phi) {
  if (phi.kind == PhiSpec::Kind::constant) {
    return {{"kind", "constant"}, {"value", phi.coeffs.front()}};
  }
  return {{"kind", "poly"}, {"coeffs", phi.coeffs}};
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
  reject_unknown(doc, "", {"law", "sigma2_eps", "lattice", "seed", "quadrature",
                           "workers", "spectral", "simulate", "analyze", "verify"});
  ExperimentConfig cfg;
  if (doc.contains("law")) cfg.law = parse_law(doc["law"]);
  if (doc.contains("sigma2_eps")) cfg.sigma2_eps = get_number(doc, "", "sigma2_eps");
  if (doc.contains("lattice")) {
    const auto& l = doc["lattice"];
    reject_unknown(l, "lattice", {"n1", "n2"});
    if (l.contains("n1")) cfg.lattice.n1 = get_int(l, "lattice", "n1");
    if (l.contains("n2")) cfg.lattice.n2 = get_int(l, "lattice", "n2");
  }
  if (doc.contains("seed")) {
    const auto& s = doc["seed"];
    if (!s.is_number_unsigned()) throw ConfigError("seed", "must be a nonnegative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("quadrature")) {
    const auto& q = doc["quadrature"];
    reject_unknown(q, "quadrature", {"rel_tol", "abs_tol", "max_subdivisions", "a_lambda_switch"});
    if (q.contains("rel_tol")) cfg.quadrature.rel_tol = get_number(q, "quadrature", "rel_tol");
    if (q.contains("abs_tol")) cfg.quadrature.abs_tol = get_number(q, "quadrature", "abs_tol");
    if (q.contains("max_subdivisions")) {
      cfg.quadrature.max_subdivisions = get_int(q, "quadrature", "max_subdivisions");
    }
    if (q.contains("a_lambda_switch")) {
      cfg.quadrature.a_lambda_switch = get_number(q, "quadrature", "a_lambda_switch");
    }
  }
  if (doc.contains("workers")) cfg.workers = get_int(doc, "", "workers");
  if (doc.contains("spectral")) {
    const auto& s = doc["spectral"];
    reject_unknown(s, "spectral", {"format", "line_t", "direction"});
    if (s.contains("format")) cfg.spectral.format = get_string(s, "spectral", "format");
    if (s.contains("line_t")) cfg.spectral.line_t = get_number_list(s, "spectral", "line_t");
    if (s.contains("direction")) {
      const auto d = get_number_list(s, "spectral", "direction");
      if (d.size() != 2) throw ConfigError("spectral.direction", "must have two entries");
      cfg.spectral.direction = {d[0], d[1]};
    }
  }
  if (doc.contains("simulate")) {
    const auto& s = doc["simulate"];
    reject_unknown(s, "simulate", {"mode", "theta", "N", "replicates", "format"});
    if (s.contains("mode")) cfg.simulate.mode = get_string(s, "simulate", "mode");
    if (s.contains("theta")) cfg.simulate.theta = get_number(s, "simulate", "theta");
    if (s.contains("N")) cfg.simulate.count = get_int(s, "simulate", "N");
    if (s.contains("replicates")) cfg.simulate.replicates = get_int(s, "simulate", "replicates");
    if (s.contains("format")) cfg.simulate.format = get_string(s, "simulate", "format");
  }
  if (doc.contains("analyze")) {
    const auto& a = doc["analyze"];
    reject_unknown(a, "analyze", {"n_bins", "fit_range", "inputs"});
    if (a.contains("n_bins")) cfg.analyze.n_bins = get_int(a, "analyze", "n_bins");
    if (a.contains("fit_range")) {
      const auto r = get_number_list(a, "analyze", "fit_range");
      if (r.size() != 2) throw ConfigError("analyze.fit_range", "must be [r_min, r_max]");
      cfg.analyze.fit_range = FitRange{r[0], r[1]};
    }
    if (a.contains("inputs")) {
      const auto& in = a["inputs"];
      if (!in.is_array()) throw ConfigError("analyze.inputs", "must be an array of paths");
      for (const auto& p : in) {
        if (!p.is_string()) throw ConfigError("analyze.inputs", "must be an array of paths");
        cfg.analyze.inputs.push_back(p.get<std::string>());
      }
    }
  }
  if (doc.contains("verify")) {
    const auto& v = doc["verify"];
    reject_unknown(v, "verify", {"alphas", "route_samples"});
    if (v.contains("alphas")) cfg.verify.alphas = get_number_list(v, "verify", "alphas");
    if (v.contains("route_samples")) cfg.verify.route_samples = get_int(v, "verify", "route_samples");
  }
  return cfg;
}

json ExperimentConfig::to_json() const {
  json doc;
  doc["law"] = {{"alpha", law.alpha},
                {"phi", phi_to_json(law.phi)},
                {"support", aggfield::to_string(law.support)}};
  doc["sigma2_eps"] = sigma2_eps;
  doc["lattice"] = {{"n1", lattice.n1}, {"n2", lattice.n2}};
  doc["seed"] = seed;
  doc["quadrature"] = {{"rel_tol", quadrature.rel_tol},
                       {"abs_tol", quadrature.abs_tol},
                       {"max_subdivisions", quadrature.max_subdivisions},
                       {"a_lambda_switch", quadrature.a_lambda_switch}};
  doc["workers"] = workers;
  doc["spectral"] = {{"format", spectral.format},
                     {"line_t", spectral.line_t},
                     {"direction", {spectral.direction[0], spectral.direction[1]}}};
  json sim{{"mode", simulate.mode}, {"replicates", simulate.replicates},
           {"format", simulate.format}};
  if (simulate.theta) sim["theta"] = *simulate.theta;
  if (simulate.count) sim["N"] = *simulate.count;
  doc["simulate"] = sim;
  json an{{"n_bins", analyze.n_bins}, {"inputs", analyze.inputs}};
  if (analyze.fit_range) an["fit_range"] = {analyze.fit_range->r_min, analyze.fit_range->r_max};
  doc["analyze"] = an;
  doc["verify"] = {{"alphas", verify.alphas}, {"route_samples", verify.route_samples}};
  return doc;
}

ThetaLaw ExperimentConfig::make_law() const {
  return ThetaLaw::make(law.alpha, law.phi, law.support, quadrature);
}

void ExperimentConfig::validate() const {
  if (!(law.alpha > -1.0)) {
    std::ostringstream msg;
    msg << "alpha must satisfy alpha > -1 (got " << law.alpha << ")";
    throw InvalidExponent("law.alpha: " + msg.str());
  }
  if (!(sigma2_eps > 0.0)) throw ConfigError("sigma2_eps", "must be > 0");
  if (lattice.n1 < 2) throw ConfigError("lattice.n1", "must be >= 2");
  if (lattice.n2 < 2) throw ConfigError("lattice.n2", "must be >= 2");
  if (!(quadrature.rel_tol > 0.0)) throw ConfigError("quadrature.rel_tol", "must be > 0");
  if (!(quadrature.abs_tol > 0.0)) throw ConfigError("quadrature.abs_tol", "must be > 0");
  if (quadrature.max_subdivisions < 1) {
    throw ConfigError("quadrature.max_subdivisions", "must be >= 1");
  }
  if (!(quadrature.a_lambda_switch > 0.0)) {
    throw ConfigError("quadrature.a_lambda_switch", "must be > 0");
  }
  if (workers < 1) throw ConfigError("workers", "must be >= 1");
  if (spectral.format != "csv" && spectral.format != "raw") {
    throw ConfigError("spectral.format", "must be \"csv\" or \"raw\"");
  }
  if (simulate.mode != "single" && simulate.mode != "aggregate" && simulate.mode != "limit") {
    throw ConfigError("simulate.mode", "must be \"single\", \"aggregate\" or \"limit\"");
  }
  if (simulate.format != "csv" && simulate.format != "raw") {
    throw ConfigError("simulate.format", "must be \"csv\" or \"raw\"");
  }
  if (simulate.replicates < 1) throw ConfigError("simulate.replicates", "must be >= 1");
  if (analyze.n_bins < 2) throw ConfigError("analyze.n_bins", "must be >= 2");
  if (analyze.fit_range && !(analyze.fit_range->r_min < analyze.fit_range->r_max)) {
    throw ConfigError("analyze.fit_range", "r_min must be < r_max");
  }
  if (verify.route_samples < 1) throw ConfigError("verify.route_samples", "must be >= 1");
  // Constructing the law checks the remaining shape invariants.
  (void)make_law();
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const json doc = io::read_json(path);
  if (doc.is_object() && doc.value("format", "") == io::kSidecarFormat) {
    if (!doc.contains("config")) {
      throw ConfigError("config", "sidecar does not embed a resolved config");
    }
    return ExperimentConfig::from_json(doc["config"]);
  }
  return ExperimentConfig::from_json(doc);
}

}  // namespace aggfield
