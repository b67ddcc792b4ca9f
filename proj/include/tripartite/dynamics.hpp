#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tripartite/model.hpp"
#include "tripartite/ode.hpp"

namespace tripartite {

enum class ChannelKind { photon, photon_pair, phonon, atom };

std::string to_string(ChannelKind kind);

struct CollapseChannel {
  Operator op;
  double rate = 0.0;
  ChannelKind kind = ChannelKind::photon;
};

/// a (κ_a), a² (κ_{a²}), b (κ_b) and σ (γ); channels with zero rate are
/// omitted.
std::vector<CollapseChannel> model_channels(const ModelParams& params, const HilbertSpace& space);

/// ρ ↦ i[ρ, H] + Σ_k rate_k (2O_kρO_k† − ρO_k†O_k − O_k†O_kρ)/2
class Superoperator {
 public:
  Superoperator(const Operator& h, std::vector<CollapseChannel> channels);

  const HilbertSpace& space() const { return space_; }
  const Operator& hamiltonian() const { return h_; }
  const std::vector<CollapseChannel>& channels() const { return channels_; }

  /// Matrix-free action on an operator.
  Matrix apply(const Matrix& rho) const;
  /// Explicit matrix acting on column-stacked vec(ρ).
  const SparseMatrix& matrix() const { return matrix_; }
  Vector apply_vectorized(const Vector& vec_rho) const { return matrix_ * vec_rho; }

  /// Smallest nonzero channel rate (0 without channels).
  double min_rate() const;

 private:
  HilbertSpace space_;
  Operator h_;
  std::vector<CollapseChannel> channels_;
  SparseMatrix jump_sum_;  // Σ rate O†O
  SparseMatrix matrix_;
};

Superoperator liouvillian(const Operator& h, std::vector<CollapseChannel> channels);

inline Vector vectorize(const Matrix& m) { return m.reshaped(); }
inline Matrix unvectorize(const Vector& v, Eigen::Index n) { return v.reshaped(n, n); }

/// Observables sampled during an evolution.
struct ObservableSet {
  bool occupations = true;  ///< "n_a", "n_b"
  bool parity = true;       ///< "parity" = ⟨Π⟩
  std::vector<Label> populations;  ///< "P_<label>"
};

/// Default populations P_{n_a n_b ±} for n_a, n_b ≤ 2.
std::vector<Label> low_lying_labels(const HilbertSpace& space, int max_quanta = 2);

struct EvolutionResult {
  std::vector<double> times;
  std::map<std::string, std::vector<double>> observables;
  std::optional<StateVector> final_state;
  std::optional<DensityMatrix> final_density;

  const std::vector<double>& series(const std::string& name) const;
};

/// Solves i d|ψ⟩/dt = H|ψ⟩ from t = 0; records "norm" plus the requested
/// observables at the sample times. Tolerances are tightened up to twice,
/// 100× each, while the norm drifts by more than 1e-8.
EvolutionResult evolve_closed(const Operator& h, const StateVector& psi0,
                              const std::vector<double>& times,
                              const ObservableSet& observables = {},
                              IntegratorOptions options = {});

/// Integrates dρ/dt = L(ρ) from t = 0 without renormalization, keeping only the
/// Hermitian part of each derivative; records "trace" and "hermiticity"
/// (max|ρ − ρ†|) as diagnostics.
EvolutionResult evolve_open(const Superoperator& l, const DensityMatrix& rho0,
                            const std::vector<double>& times,
                            const ObservableSet& observables = {},
                            IntegratorOptions options = {});

struct SteadyStateOptions {
  /// Direct sparse LU when total_dim² is at most this, iterative otherwise.
  long direct_limit = 20000;
  double residual_tol = 1e-10;
  double positivity_tol = 1e-8;
};

/// Solves L(ρ) = 0 with Tr ρ = 1 (one row of vec L replaced by the trace).
/// Falls back to long-time evolution when the linear solve fails.
DensityMatrix steady_state(const Superoperator& l, const SteadyStateOptions& options = {});

/// Entrywise ℓ1 norm of L(ρ); bounds the trace norm from above.
double residual_norm(const Superoperator& l, const DensityMatrix& rho);

/// Vacuum ⊗ |−⟩.
StateVector dressed_ground(const HilbertSpace& space);

}  // namespace tripartite
