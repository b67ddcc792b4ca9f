#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tripartite/model.hpp"

namespace tripartite {

/// Invalid or incomplete configuration; the message lists every problem.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// One runnable experiment after defaults and case overrides are merged.
struct CaseConfig {
  std::string name;        ///< empty for a single-case config
  std::string experiment;  ///< scan, rabi, evolve, steady, spectrum, g2-sweep, rates, trajectories, events
  ModelParams model;
  HilbertSpace space{6, 6};
  nlohmann::json knobs;     ///< experiment section with every default filled in
  nlohmann::json resolved;  ///< complete resolved configuration of this case
  std::filesystem::path output_dir;
};

struct ExperimentConfig {
  std::filesystem::path source;
  std::filesystem::path output_dir;
  std::vector<CaseConfig> cases;
};

/// Names accepted in the "experiment" field.
const std::vector<std::string>& experiment_names();

/// Default knob section of an experiment.
nlohmann::json experiment_defaults(const std::string& experiment);

/// Parses JSON text (comments allowed). Relative output_dir values are kept
/// relative to the working directory.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& source = {});

ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace tripartite
