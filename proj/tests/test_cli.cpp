#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "tripartite/experiments.hpp"

using namespace tripartite;
using doctest::Approx;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tripartite_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string issues_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("empty and malformed configs") {
  CHECK_THROWS_AS(parse_config(""), ConfigError);
  CHECK_THROWS_AS(parse_config("{}"), ConfigError);
  CHECK_THROWS_AS(parse_config("{\"experiment\": "), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("every problem is reported") {
  const std::string msg = issues_of(R"({
    "experiment": "trajectories",
    "output_dir": "/tmp/x",
    "model": {"lambda": -1, "typo": 1},
    "truncation": {"photon": 0},
    "trajectories": {"n_traj": 0, "colour": "red"}
  })");
  CHECK(msg.find("seed is required") != std::string::npos);
  CHECK(msg.find("unknown key 'model.typo'") != std::string::npos);
  CHECK(msg.find("unknown key 'trajectories.colour'") != std::string::npos);
  CHECK(msg.find("n_traj") != std::string::npos);
  CHECK(msg.find("truncation") != std::string::npos);
  CHECK(msg.find("lambda") != std::string::npos);
}

TEST_CASE("type and grid checks") {
  CHECK(issues_of(R"({"experiment": "rates", "output_dir": "/tmp/x", "model": {"lambda": "big"}})")
            .find("wrong type") != std::string::npos);
  CHECK(issues_of(R"({"experiment": "rates", "output_dir": "/tmp/x", "rates": {"lambda_grid": [0.2, 0.1]}})")
            .find("sorted") != std::string::npos);
  CHECK(issues_of(R"({"experiment": "fly", "output_dir": "/tmp/x"})").find("unknown experiment") != std::string::npos);
  CHECK(issues_of(R"({"experiment": "scan"})").find("output_dir") != std::string::npos);
  CHECK(issues_of(R"({"experiment": "rabi", "output_dir": "/tmp/x", "rabi": {"target": "99-"}})")
            .find("outside the truncation") != std::string::npos);
  CHECK(issues_of(R"({"experiment": "scan", "output_dir": "/etc/hostname/out"})").find("not writable") != std::string::npos);
}

TEST_CASE("defaults are resolved and comments allowed") {
  const auto cfg = parse_config(R"({
    // comment
    "experiment": "spectrum",
    "output_dir": "/tmp/out",
    "model": {"kappa_a": 0.25, "kappa_b": 0.25}
  })");
  REQUIRE(cfg.cases.size() == 1);
  const auto& c = cfg.cases[0];
  CHECK(c.experiment == "spectrum");
  CHECK(c.model.kappa_a == 0.25);
  CHECK(c.model.delta_a == 1.6);
  CHECK(c.space.photon_trunc == 6);
  CHECK(c.knobs["tau_points"] == 4096);
  CHECK(c.knobs["omega_step"] == 0.005);
  CHECK(c.resolved["model"]["gamma"] == 0.0);
  CHECK(c.output_dir == fs::path("/tmp/out"));
  for (const auto& e : experiment_names()) CHECK(experiment_defaults(e).is_object());
}

TEST_CASE("cases merge over the shared base") {
  const auto cfg = parse_config(R"({
    "experiment": "steady",
    "output_dir": "/tmp/out",
    "model": {"lambda": 0.2, "kappa_a": 0.1, "kappa_b": 0.1},
    "cases": [
      {"name": "a"},
      {"name": "b", "model": {"lambda": 0.3}, "truncation": {"photon": 4}},
      {"name": "c", "experiment": "rates"}
    ]
  })");
  REQUIRE(cfg.cases.size() == 3);
  CHECK(cfg.cases[0].model.lambda == 0.2);
  CHECK(cfg.cases[1].model.lambda == 0.3);
  CHECK(cfg.cases[1].model.kappa_a == 0.1);
  CHECK(cfg.cases[1].space.photon_trunc == 4);
  CHECK(cfg.cases[1].space.phonon_trunc == 6);
  CHECK(cfg.cases[2].experiment == "rates");
  CHECK(cfg.cases[2].output_dir == fs::path("/tmp/out/c"));
  CHECK(issues_of(R"({"experiment": "steady", "output_dir": "/tmp/o", "cases": [{"name": "a"}, {"name": "a"}]})")
            .find("duplicate") != std::string::npos);
}

TEST_CASE("shipped presets validate") {
  int n = 0;
  for (const auto& entry : fs::directory_iterator(TRIPARTITE_PRESET_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++n;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_config(entry.path()));
  }
  CHECK(n == 8);
}

TEST_CASE("scan experiment writes artifacts and a manifest") {
  const fs::path dir = scratch("scan");
  auto cfg = parse_config(R"({
    "experiment": "scan",
    "output_dir": ")" + dir.string() + R"(",
    "truncation": {"photon": 4, "phonon": 4},
    "scan": {"omega_min": 1.1, "omega_max": 1.5, "omega_step": 0.01, "n_levels": 6,
             "anticrossings": [{"pair": ["00+", "11-"], "bracket": [1.1, 1.5]}]}
  })");
  std::ostringstream log;
  const json manifest = run_experiment(cfg, log);
  CHECK(manifest.contains("version"));
  CHECK(manifest["wall_time_seconds"].get<double>() >= 0.0);
  CHECK(manifest["resolved"][0]["scan"]["n_levels"] == 6);
  CHECK(fs::exists(dir / "manifest.json"));
  const std::string csv = slurp(dir / "levels.csv");
  CHECK(csv.rfind("omega,E_1,E_2,E_3,E_4,E_5,E_6\n", 0) == 0);
  const json ac = json::parse(slurp(dir / "anticrossings.json"));
  CHECK(std::abs(ac[0]["omega_star"].get<double>() - 1.3) < 0.05);

  // Byte-identical rerun apart from the manifest timing.
  const std::string first = csv;
  run_experiment(cfg, log);
  CHECK(slurp(dir / "levels.csv") == first);
  fs::remove_all(dir);
}

TEST_CASE("numerical failures name their stage") {
  const fs::path dir = scratch("fail");
  auto cfg = parse_config(R"({
    "experiment": "scan",
    "output_dir": ")" + dir.string() + R"(",
    "truncation": {"photon": 3, "phonon": 3},
    "scan": {"omega_min": 1.1, "omega_max": 1.5, "omega_step": 0.05, "n_levels": 4,
             "anticrossings": [{"pair": ["00+", "11-"], "bracket": [1.6, 1.9]}]}
  })");
  std::ostringstream log;
  try {
    run_experiment(cfg, log);
    FAIL("expected a numerical failure");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("anticrossing") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("first peak of a rippled oscillation") {
  std::vector<double> t, y;
  for (int i = 0; i <= 4000; ++i) {
    const double x = i * 0.1;
    t.push_back(x);
    y.push_back(0.8 * std::pow(std::sin(x / 60.0), 2) + 0.05 * std::sin(3 * x));
  }
  const Peak p = first_peak(t, y);
  REQUIRE(p.found);
  CHECK(p.time == Approx(60.0 * std::numbers::pi / 2).epsilon(0.02));
  CHECK_FALSE(first_peak({0, 1, 2}, {0, 0.5, 1.0}).found);
}

TEST_CASE("rank correlation") {
  CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == Approx(1.0));
  CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == Approx(-1.0));
  CHECK(spearman({1, 2, 3, 4}, {1, 3, 2, 4}) == Approx(0.8));
  CHECK(std::isnan(spearman({1, 2, 3}, {5, 5, 5})));
}

TEST_CASE("transient between a phonon and a pair emission") {
  TrajectoryRecord r;
  r.sample_times = {0, 1, 2, 3, 4, 5};
  r.samples["P_21-"] = {0, 0, 0.3, 0, 0, 0};
  r.events = {{1.5, ChannelKind::phonon, 1}, {1.8, ChannelKind::atom, 1}, {2.5, ChannelKind::photon_pair, 2}};
  CHECK(transient_between_phonon_and_pair(r, "P_21-", 0.1));
  CHECK_FALSE(transient_between_phonon_and_pair(r, "P_21-", 0.5));
  r.events[0].channel = ChannelKind::photon;
  CHECK_FALSE(transient_between_phonon_and_pair(r, "P_21-", 0.1));
  CHECK_THROWS_AS(transient_between_phonon_and_pair(r, "P_11-", 0.1), InvalidArgument);
}

TEST_CASE("uniform grids") {
  const auto g = uniform_grid(1.0, 3.0, 0.005);
  CHECK(g.size() == 401);
  CHECK(g(400) == Approx(3.0));
  CHECK_THROWS_AS(uniform_grid(1.0, 0.5, 0.1), InvalidArgument);
}
