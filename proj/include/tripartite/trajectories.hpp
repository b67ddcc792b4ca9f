#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tripartite/dynamics.hpp"

namespace tripartite {

struct JumpEvent {
  double time = 0.0;
  ChannelKind channel = ChannelKind::photon;
  int quanta_removed = 1;
};

struct TrajectoryRecord {
  std::uint64_t seed = 0;
  std::vector<JumpEvent> events;
  std::vector<double> sample_times;
  /// Named series on sample_times ("n_a", "n_b", "parity", "P_<label>").
  std::map<std::string, std::vector<double>> samples;
  /// Normalized states on sample_times, kept only on request.
  std::vector<Vector> states;
};

enum class Propagator {
  automatic,    ///< spectral when the non-Hermitian Hamiltonian diagonalizes well
  spectral,     ///< exact exponential through the eigen-decomposition of H_nh
  runge_kutta,  ///< adaptive Dormand–Prince with dense-output root finding
};

struct TrajectoryOptions {
  std::vector<double> sample_times;  ///< within [0, t_max], nondecreasing
  ObservableSet observables{true, true, {}};
  bool keep_states = false;
  Propagator propagator = Propagator::automatic;
  IntegratorOptions integrator{1e-9, 1e-11};
  double time_tol = 1e-10;  ///< jump-time bisection tolerance
  /// Largest accepted condition estimate of the H_nh eigenbasis.
  double max_condition = 1e8;
};

/// Monte Carlo wavefunction unraveling. Between jumps the state evolves under
/// H − (i/2)Σ rate O†O; a jump fires when ‖ψ‖² falls to a uniform threshold
/// and channel k is picked with weight rate_k‖O_kψ‖². Trajectory j draws from
/// std::mt19937_64 seeded with base_seed + j; uniforms take the top 53 bits.
std::vector<TrajectoryRecord> run_trajectories(const Operator& h,
                                               const std::vector<CollapseChannel>& channels,
                                               const StateVector& psi0, double t_max, int n_traj,
                                               std::uint64_t base_seed,
                                               const TrajectoryOptions& options = {});

struct EnsembleSeries {
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> stderr_;
  bool stderr_defined = true;  ///< false for a single trajectory
};

/// Pointwise mean and standard error of a named sample series.
EnsembleSeries ensemble_average(const std::vector<TrajectoryRecord>& records,
                                const std::string& observable);
/// Same for an arbitrary operator; needs records with kept states.
EnsembleSeries ensemble_average(const std::vector<TrajectoryRecord>& records, const Operator& op);

struct EmissionStats {
  double window_T = 0.0;
  int n_trajectories = 0;
  double mean_events = 0.0;
  double stderr_ = 0.0;
  std::vector<int> per_trajectory;
};

/// Clusters the photon-type (single or pair) and phonon events inside
/// [0, window_T] into runs whose consecutive spacing is ≤ coincidence, then
/// counts the runs holding at least one photon-type and one phonon event.
/// Atomic events are ignored.
EmissionStats count_correlated_emissions(const std::vector<TrajectoryRecord>& records,
                                         double window_T, double coincidence);

/// Default coincidence window 2/κ_a, or 2/κ_{a²} when κ_a = 0.
double default_coincidence(const ModelParams& params);

/// Populations |⟨n_a n_b ±|ψ⟩|² per sample; uses stored P_ series or kept
/// states. Throws InvalidArgument for labels that are unavailable.
std::map<std::string, std::vector<double>> trajectory_populations(const TrajectoryRecord& record,
                                                                  const HilbertSpace& space,
                                                                  const std::vector<Label>& labels);

}  // namespace tripartite
