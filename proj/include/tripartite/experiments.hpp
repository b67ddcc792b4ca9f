#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tripartite/config.hpp"
#include "tripartite/correlations.hpp"
#include "tripartite/perturbation.hpp"
#include "tripartite/trajectories.hpp"

namespace tripartite {

struct CaseOutcome {
  nlohmann::json resolved;  ///< case config with automatic values filled in
  nlohmann::json summary;
  std::vector<std::string> files;
};

/// Runs one case and writes its artifacts into case.output_dir. Numerical
/// failures are rethrown as NumericalError prefixed with the failing stage.
CaseOutcome run_case(const CaseConfig& config, std::ostream& log);

/// Runs every case and writes manifest.json (resolved config, version, wall
/// time) into the output directory. Returns the manifest.
nlohmann::json run_experiment(const ExperimentConfig& config, std::ostream& log);

/// Ω* of a {"pair": [..], "bracket": [..]} spec, or params.omega_drive for null.
double resolve_drive(const ModelParams& params, const HilbertSpace& space,
                     const nlohmann::json& resonance);

/// "dressed_ground" or a label such as "00+".
StateVector initial_state(const HilbertSpace& space, const nlohmann::json& spec);

/// 40 / min of the positive bosonic loss rates (κ_a, κ_{a²}, κ_b).
double default_tau_max(const ModelParams& params);

struct Peak {
  bool found = false;
  double time = 0.0;
  double value = 0.0;
};

/// Maximum of the first excursion of y above fraction·max(y). The excursion ends
/// once y falls below half that level, so fast ripples near the threshold do not split it.
Peak first_peak(const std::vector<double>& t, const std::vector<double>& y, double fraction = 0.5);

/// Spearman rank correlation with average ranks for ties; NaN when either
/// series is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// True when some sample of the named series exceeds threshold while the
/// surrounding pair of consecutive bosonic events is one phonon and one
/// photon-pair event, in either order.
bool transient_between_phonon_and_pair(const TrajectoryRecord& record, const std::string& series,
                                       double threshold);

/// Uniform grid lo, lo + step, ..., hi (inclusive within step/2).
RealVector uniform_grid(double lo, double hi, double step);

}  // namespace tripartite
