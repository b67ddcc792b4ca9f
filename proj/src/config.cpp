#include "tripartite/config.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <unistd.h>

namespace tripartite {

using nlohmann::json;

namespace {

const json kModelDefaults = {
    {"delta_a", 1.6},  {"delta_sigma", 0.0}, {"omega_b", 1.0}, {"lambda", 0.15},
    {"omega_drive", 1.3}, {"kappa_a", 0.0},  {"kappa_a2", 0.0}, {"kappa_b", 0.0},
    {"gamma", 0.0}};

const json kTruncationDefaults = {{"photon", 6}, {"phonon", 6}};

const json kLowLabels = {"00+", "00-", "11+", "11-", "22+", "22-", "20-", "02-", "21-", "10+",
                         "10-", "01-"};

json defaults_for(const std::string& e) {
  if (e == "scan")
    return {{"omega_min", 1.0}, {"omega_max", 3.0}, {"omega_step", 0.005},
            {"n_levels", 12},   {"anticrossings", json::array()}};
  if (e == "rabi")
    return {{"initial", "00+"}, {"target", "11-"}, {"t_max", 60.0},
            {"dt", 0.05},       {"resonance", nullptr}, {"populations", {"00+", "11-", "11+"}}};
  if (e == "evolve")
    return {{"initial", "dressed_ground"}, {"t_max", 200.0}, {"dt", 0.5},
            {"resonance", nullptr},        {"populations", kLowLabels}};
  if (e == "steady") return {{"resonance", nullptr}, {"populations", kLowLabels}};
  if (e == "spectrum")
    return {{"resonance", nullptr}, {"omega_min", 0.0},   {"omega_max", 3.0},
            {"omega_step", 0.005},  {"tau_max", nullptr}, {"tau_points", 4096},
            {"tau_max_step", 0.1}};
  if (e == "g2-sweep")
    return {{"lambda_grid", {0.05, 0.1, 0.15, 0.2, 0.25, 0.3}}, {"resonance", nullptr}};
  if (e == "rates")
    return {{"quanta", 1}, {"lambda_grid", {0.05, 0.1, 0.15, 0.2}}, {"bracket", {1.1, 1.5}}};
  if (e == "trajectories")
    return {{"initial", "dressed_ground"}, {"t_max", 2000.0},      {"n_traj", 50},
            {"seed", nullptr},             {"dt", 0.5},            {"resonance", nullptr},
            {"populations", kLowLabels},   {"write_populations", 5}};
  if (e == "events")
    return {{"lambda_grid", {0.05, 0.1, 0.15, 0.2}},
            {"quanta", 1},
            {"window_T", 1e5},
            {"n_traj", 20},
            {"seed", nullptr},
            {"coincidence", nullptr},
            {"resonance", nullptr},
            {"initial", "dressed_ground"}};
  throw ConfigError("unknown experiment '" + e + "'");
}

// Objects merge key by key; anything else is replaced.
void deep_merge(json& base, const json& patch) {
  if (!base.is_object() || !patch.is_object()) {
    base = patch;
    return;
  }
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (base.contains(it.key()))
      deep_merge(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

struct Report {
  std::vector<std::string> issues;
  std::string prefix;
  void add(const std::string& msg) { issues.push_back(prefix + msg); }
};

bool same_kind(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) return true;
  return a.type() == b.type();
}

void check_keys(const json& value, const json& defaults, const std::string& where, Report& r) {
  if (!value.is_object()) {
    r.add(where + " must be a table");
    return;
  }
  for (auto it = value.begin(); it != value.end(); ++it) {
    if (!defaults.contains(it.key())) {
      r.add("unknown key '" + where + "." + it.key() + "'");
      continue;
    }
    const json& d = defaults[it.key()];
    if (!d.is_null() && !same_kind(d, it.value()))
      r.add("'" + where + "." + it.key() + "' has the wrong type (expected " +
            std::string(d.type_name()) + ")");
  }
}

double num(const json& knobs, const char* key) { return knobs.at(key).get<double>(); }

void check_positive(const json& knobs, const char* key, Report& r) {
  if (knobs.at(key).is_number() && !(num(knobs, key) > 0)) r.add(std::string(key) + " must be positive");
}

void check_label(const json& v, const HilbertSpace& space, const std::string& what, Report& r) {
  if (!v.is_string()) {
    r.add(what + " must be a label string such as \"11-\"");
    return;
  }
  try {
    const Label l = parse_label(v.get<std::string>());
    if (l.n_a > space.photon_trunc || l.n_b > space.phonon_trunc)
      r.add(what + " '" + l.str() + "' lies outside the truncation");
  } catch (const Error& e) {
    r.add(what + ": " + e.what());
  }
}

void check_labels(const json& arr, const HilbertSpace& space, const std::string& what, Report& r) {
  if (!arr.is_array()) return r.add(what + " must be an array of labels");
  for (const auto& v : arr) check_label(v, space, what, r);
}

void check_grid(const json& arr, const std::string& what, Report& r) {
  if (!arr.is_array() || arr.empty()) return r.add(what + " must be a non-empty array");
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& v : arr) {
    if (!v.is_number()) return r.add(what + " must contain numbers");
    if (!(v.get<double>() > prev)) return r.add(what + " must be sorted strictly ascending");
    prev = v.get<double>();
  }
}

void check_bracket(const json& v, const std::string& what, Report& r) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number() ||
      !(v[1].get<double>() > v[0].get<double>()))
    r.add(what + " must be [lo, hi] with lo < hi");
}

void check_pair(const json& v, const HilbertSpace& space, const std::string& what, Report& r) {
  if (!v.is_array() || v.size() != 2) return r.add(what + " must be a pair of labels");
  check_labels(v, space, what, r);
}

void check_resonance(const json& v, const CaseConfig& c, Report& r) {
  if (v.is_null()) return;
  const json d = {{"pair", json::array()}, {"bracket", json::array()}};
  check_keys(v, d, "resonance", r);
  if (!v.is_object()) return;
  if (!v.contains("pair") || !v.contains("bracket"))
    return r.add("resonance needs both 'pair' and 'bracket'");
  check_pair(v["pair"], c.space, "resonance.pair", r);
  check_bracket(v["bracket"], "resonance.bracket", r);
  if (c.model.delta_sigma != 0.0) r.add("resonance tracking requires model.delta_sigma = 0");
}

void check_initial(const json& v, const HilbertSpace& space, Report& r) {
  if (v.is_string() && v.get<std::string>() == "dressed_ground") return;
  check_label(v, space, "initial", r);
}

void check_seed(const json& v, Report& r) {
  if (v.is_null()) return r.add("seed is required for trajectory experiments");
  if (!v.is_number_integer() || v.get<long long>() < 0) r.add("seed must be a non-negative integer");
}

void check_writable(const std::filesystem::path& dir, Report& r) {
  namespace fs = std::filesystem;
  fs::path probe = fs::absolute(dir);
  while (!probe.empty() && !fs::exists(probe)) probe = probe.parent_path();
  if (probe.empty() || !fs::is_directory(probe) || ::access(probe.c_str(), W_OK) != 0)
    r.add("output_dir '" + dir.string() + "' is not writable");
}

void validate_knobs(CaseConfig& c, Report& r) {
  const json& k = c.knobs;
  const std::string& e = c.experiment;
  auto has_num = [&](const char* key) { return k.at(key).is_number(); };
  if (k.contains("resonance")) check_resonance(k["resonance"], c, r);
  if (k.contains("populations")) check_labels(k["populations"], c.space, "populations", r);
  if (k.contains("initial")) check_initial(k["initial"], c.space, r);
  if (k.contains("lambda_grid")) {
    check_grid(k["lambda_grid"], "lambda_grid", r);
    if (k["lambda_grid"].is_array() && !k["lambda_grid"].empty() &&
        k["lambda_grid"][0].is_number() && !(k["lambda_grid"][0].get<double>() > 0))
      r.add("lambda_grid values must be positive");
  }
  for (const char* key : {"t_max", "dt", "omega_step", "window_T", "tau_max_step"})
    if (k.contains(key)) check_positive(k, key, r);
  if (k.contains("n_traj") && (!k["n_traj"].is_number_integer() || k["n_traj"].get<int>() < 1))
    r.add("n_traj must be a positive integer");
  if (k.contains("quanta") && (!k["quanta"].is_number_integer() ||
                               (k["quanta"].get<int>() != 1 && k["quanta"].get<int>() != 2)))
    r.add("quanta must be 1 or 2");
  if (k.contains("coincidence") && !k["coincidence"].is_null() &&
      !(k["coincidence"].is_number() && k["coincidence"].get<double>() > 0))
    r.add("coincidence must be null (default) or positive");
  if (k.contains("tau_max") && !k["tau_max"].is_null() &&
      !(k["tau_max"].is_number() && k["tau_max"].get<double>() > 0))
    r.add("tau_max must be null (automatic) or positive");

  if (e == "scan") {
    if (has_num("omega_min") && has_num("omega_max") && !(num(k, "omega_max") > num(k, "omega_min")))
      r.add("omega_max must exceed omega_min");
    if (!k["n_levels"].is_number_integer() || k["n_levels"].get<int>() < 1 ||
        k["n_levels"].get<int>() >= c.space.total_dim())
      r.add("n_levels must lie in [1, total_dim)");
    if (k["anticrossings"].is_array()) {
      for (const auto& ac : k["anticrossings"]) {
        check_keys(ac, {{"pair", json::array()}, {"bracket", json::array()}}, "anticrossings[]", r);
        if (!ac.is_object() || !ac.contains("pair") || !ac.contains("bracket")) {
          r.add("anticrossings entries need 'pair' and 'bracket'");
          continue;
        }
        check_pair(ac["pair"], c.space, "anticrossings.pair", r);
        check_bracket(ac["bracket"], "anticrossings.bracket", r);
      }
    }
  }
  if (e == "scan" || e == "rates")
    if (c.model.delta_sigma != 0.0) r.add(e + " uses the dressed frame and needs delta_sigma = 0");
  if (e == "spectrum") {
    if (has_num("omega_min") && has_num("omega_max") && !(num(k, "omega_max") > num(k, "omega_min")))
      r.add("omega_max must exceed omega_min");
    if (!k["tau_points"].is_number_integer() || k["tau_points"].get<int>() < 2)
      r.add("tau_points must be an integer ≥ 2");
    if (c.model.kappa_a + c.model.kappa_a2 <= 0 || c.model.kappa_b <= 0)
      r.add("spectrum needs photon and phonon loss (kappa_a or kappa_a2, and kappa_b)");
  }
  if (e == "rabi") {
    check_label(k["target"], c.space, "target", r);
    check_label(k["initial"], c.space, "initial", r);
  }
  if (e == "rates") check_bracket(k["bracket"], "bracket", r);
  if (e == "trajectories" || e == "events") check_seed(k["seed"], r);
  if (e == "trajectories" &&
      (!k["write_populations"].is_number_integer() || k["write_populations"].get<int>() < 0))
    r.add("write_populations must be a non-negative integer");
  if (e == "events" && k["coincidence"].is_null() && c.model.kappa_a <= 0 && c.model.kappa_a2 <= 0)
    r.add("events need an explicit coincidence window when kappa_a = kappa_a2 = 0");
}

CaseConfig resolve_case(const json& merged, const std::filesystem::path& out_root,
                        const std::string& name, Report& r) {
  CaseConfig c;
  c.name = name;
  r.prefix = name.empty() ? "" : "case '" + name + "': ";

  static const std::set<std::string> top = [] {
    std::set<std::string> s{"experiment", "output_dir", "model", "truncation", "description"};
    for (const auto& e : experiment_names()) s.insert(e);
    return s;
  }();
  for (auto it = merged.begin(); it != merged.end(); ++it)
    if (!top.count(it.key()) && it.key() != "name" && it.key() != "cases")
      r.add("unknown key '" + it.key() + "'");

  if (!merged.contains("experiment") || !merged["experiment"].is_string()) {
    r.add("missing 'experiment' (one of scan, rabi, evolve, steady, spectrum, g2-sweep, rates, trajectories, events)");
    return c;
  }
  c.experiment = merged["experiment"].get<std::string>();
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end()) {
    r.add("unknown experiment '" + c.experiment + "'");
    return c;
  }

  json model = kModelDefaults;
  if (merged.contains("model")) {
    check_keys(merged["model"], kModelDefaults, "model", r);
    if (merged["model"].is_object()) deep_merge(model, merged["model"]);
  }
  json trunc = kTruncationDefaults;
  if (merged.contains("truncation")) {
    check_keys(merged["truncation"], kTruncationDefaults, "truncation", r);
    if (merged["truncation"].is_object()) deep_merge(trunc, merged["truncation"]);
  }
  json knobs = experiment_defaults(c.experiment);
  if (merged.contains(c.experiment)) {
    check_keys(merged[c.experiment], knobs, c.experiment, r);
    if (merged[c.experiment].is_object()) deep_merge(knobs, merged[c.experiment]);
  }
  try {
    c.model = {model["delta_a"].get<double>(),  model["delta_sigma"].get<double>(),
               model["omega_b"].get<double>(),  model["lambda"].get<double>(),
               model["omega_drive"].get<double>(), model["kappa_a"].get<double>(),
               model["kappa_a2"].get<double>(), model["kappa_b"].get<double>(),
               model["gamma"].get<double>()};
    c.model.validate();
  } catch (const std::exception& e) {
    r.add(std::string("model: ") + e.what());
  }
  try {
    if (!trunc["photon"].is_number_integer() || !trunc["phonon"].is_number_integer())
      throw InvalidArgument("truncations must be integers");
    c.space = build_space(trunc["photon"].get<int>(), trunc["phonon"].get<int>());
  } catch (const std::exception& e) {
    r.add(std::string("truncation: ") + e.what());
  }
  c.knobs = knobs;
  try {
    validate_knobs(c, r);
  } catch (const json::exception& e) {
    r.add(std::string("malformed value: ") + e.what());
  }

  c.output_dir = name.empty() ? out_root : out_root / name;
  c.resolved = {{"experiment", c.experiment}, {"model", model}, {"truncation", trunc},
                {c.experiment, knobs},        {"output_dir", c.output_dir.string()}};
  if (!name.empty()) c.resolved["name"] = name;
  return c;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"scan",     "rabi",  "evolve",       "steady",
                                              "spectrum", "g2-sweep", "rates", "trajectories",
                                              "events"};
  return names;
}

nlohmann::json experiment_defaults(const std::string& experiment) { return defaults_for(experiment); }

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& source) {
  json root;
  try {
    root = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object() || root.empty()) throw ConfigError("config is empty; expected a table with at least 'experiment' and 'output_dir'");

  Report r;
  ExperimentConfig cfg;
  cfg.source = source;
  if (!root.contains("output_dir") || !root["output_dir"].is_string() ||
      root["output_dir"].get<std::string>().empty())
    r.add("missing 'output_dir'");
  else
    cfg.output_dir = root["output_dir"].get<std::string>();
  if (!cfg.output_dir.empty()) check_writable(cfg.output_dir, r);

  json base = root;
  base.erase("cases");
  if (root.contains("cases")) {
    const json& cases = root["cases"];
    if (!cases.is_array() || cases.empty()) {
      r.add("'cases' must be a non-empty array of tables");
    } else {
      std::set<std::string> seen;
      for (std::size_t i = 0; i < cases.size(); ++i) {
        const json& item = cases[i];
        if (!item.is_object() || !item.contains("name") || !item["name"].is_string() ||
            item["name"].get<std::string>().empty()) {
          r.add("cases[" + std::to_string(i) + "] needs a non-empty 'name'");
          continue;
        }
        const std::string name = item["name"].get<std::string>();
        if (!seen.insert(name).second) r.add("duplicate case name '" + name + "'");
        if (name.find('/') != std::string::npos || name == "." || name == "..")
          r.add("case name '" + name + "' must be a plain directory name");
        if (item.contains("output_dir") || item.contains("cases"))
          r.add("case '" + name + "' may not set output_dir or cases");
        json merged = base;
        deep_merge(merged, item);
        cfg.cases.push_back(resolve_case(merged, cfg.output_dir, name, r));
      }
    }
  } else {
    cfg.cases.push_back(resolve_case(base, cfg.output_dir, "", r));
  }

  if (!r.issues.empty()) {
    std::ostringstream msg;
    msg << "configuration invalid (" << r.issues.size() << " issue"
        << (r.issues.size() == 1 ? "" : "s") << "):";
    for (const auto& issue : r.issues) msg << "\n  - " << issue;
    throw ConfigError(msg.str());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path);
}

}  // namespace tripartite
