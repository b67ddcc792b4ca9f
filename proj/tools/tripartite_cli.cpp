// Config-driven runner for the tripartite cavity–atom–mechanics experiments.
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tripartite/experiments.hpp"

namespace fs = std::filesystem;
using namespace tripartite;

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

fs::path preset_dir() {
  if (const char* env = std::getenv("TRIPARTITE_PRESETS")) return env;
  return TRIPARTITE_PRESET_DIR;
}

// Accepts a path or the bare name of a shipped preset.
fs::path locate(const std::string& arg) {
  if (fs::exists(arg)) return arg;
  for (const char* ext : {".json", ""}) {
    const fs::path p = preset_dir() / (arg + ext);
    if (fs::exists(p)) return p;
  }
  return arg;
}

ExperimentConfig load(const std::string& arg, const std::string& output) {
  ExperimentConfig cfg = load_config(locate(arg));
  if (output.empty()) return cfg;
  // Re-root every case under the requested directory.
  for (auto& c : cfg.cases) {
    c.output_dir = c.name.empty() ? fs::path(output) : fs::path(output) / c.name;
    c.resolved["output_dir"] = c.output_dir.string();
  }
  cfg.output_dir = output;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tripartite cavity-atom-mechanics simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(TRIPARTITE_VERSION));
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress progress output");

  std::string run_path, run_out, validate_path;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file or preset");
  run->add_option("config", run_path, "Config file (JSON, comments allowed) or preset name")->required();
  run->add_option("-o,--output", run_out, "Override output_dir");
  auto* validate = app.add_subcommand("validate", "Check a config file and print the resolved settings");
  validate->add_option("config", validate_path, "Config file or preset name")->required();
  auto* presets = app.add_subcommand("presets", "Shipped figure presets");
  auto* list = presets->add_subcommand("list", "List preset names");
  presets->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  std::ostringstream sink;
  std::ostream& log = quiet ? static_cast<std::ostream&>(sink) : std::cerr;
  try {
    if (*list) {
      std::vector<std::string> names;
      for (const auto& entry : fs::directory_iterator(preset_dir()))
        if (entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
      std::sort(names.begin(), names.end());
      for (const auto& n : names) std::cout << n << '\n';
      return 0;
    }
    if (*validate) {
      const ExperimentConfig cfg = load(validate_path, "");
      nlohmann::json resolved = nlohmann::json::array();
      for (const auto& c : cfg.cases) resolved.push_back(c.resolved);
      std::cout << resolved.dump(2) << '\n';
      log << "config OK: " << cfg.cases.size() << " case(s)\n";
      return 0;
    }
    const ExperimentConfig cfg = load(run_path, run_out);
    const auto manifest = run_experiment(cfg, log);
    log << "done in " << manifest["wall_time_seconds"].get<double>() << " s; artifacts in "
        << cfg.output_dir.string() << '\n';
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure in " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
