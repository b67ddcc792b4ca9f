#include "tripartite/dynamics.hpp"

#include <cmath>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

namespace tripartite {

std::string to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::photon: return "photon";
    case ChannelKind::photon_pair: return "photon_pair";
    case ChannelKind::phonon: return "phonon";
    case ChannelKind::atom: return "atom";
  }
  return "unknown";
}

std::vector<CollapseChannel> model_channels(const ModelParams& params, const HilbertSpace& space) {
  params.validate();
  const Operator a = ladder_operator(space, Mode::photon);
  std::vector<CollapseChannel> out;
  if (params.kappa_a > 0) out.push_back({a, params.kappa_a, ChannelKind::photon});
  if (params.kappa_a2 > 0) out.push_back({a * a, params.kappa_a2, ChannelKind::photon_pair});
  if (params.kappa_b > 0)
    out.push_back({ladder_operator(space, Mode::phonon), params.kappa_b, ChannelKind::phonon});
  if (params.gamma > 0)
    out.push_back({atom_operator(space, AtomKind::lowering), params.gamma, ChannelKind::atom});
  return out;
}

namespace {

// Appends the nonzeros of scale·(A ⊗ B) to triplets.
void add_kron(std::vector<Triplet>& triplets, const SparseMatrix& a, const SparseMatrix& b,
              Scalar scale) {
  const Eigen::Index nb = b.rows();
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (SparseMatrix::InnerIterator ia(a, ka); ia; ++ia)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (SparseMatrix::InnerIterator ib(b, kb); ib; ++ib)
          triplets.emplace_back(int(ia.row() * nb + ib.row()), int(ia.col() * nb + ib.col()),
                                scale * ia.value() * ib.value());
}

}  // namespace

Superoperator::Superoperator(const Operator& h, std::vector<CollapseChannel> channels)
    : space_(h.space()), h_(h), channels_(std::move(channels)) {
  const int n = space_.total_dim();
  if (max_abs(h_ - h_.adjoint()) > 1e-9) throw InvalidArgument("Hamiltonian must be Hermitian");

  SparseMatrix id(n, n);
  id.setIdentity();
  jump_sum_.resize(n, n);
  std::vector<Triplet> triplets;
  // −i(I⊗H − Hᵀ⊗I)
  add_kron(triplets, id, h_.matrix(), -kI);
  add_kron(triplets, SparseMatrix(h_.matrix().transpose()), id, kI);
  for (const auto& c : channels_) {
    if (!(c.op.space() == space_)) throw InvalidArgument("collapse operator on a different space");
    if (c.rate < 0) throw InvalidArgument("collapse rates must be non-negative");
    if (c.rate == 0) continue;
    const SparseMatrix& o = c.op.matrix();
    const SparseMatrix odo = o.adjoint() * o;
    jump_sum_ += c.rate * odo;
    add_kron(triplets, SparseMatrix(o.conjugate()), o, c.rate);
    add_kron(triplets, id, odo, -0.5 * c.rate);
    add_kron(triplets, SparseMatrix(odo.transpose()), id, -0.5 * c.rate);
  }
  matrix_.resize(Eigen::Index(n) * n, Eigen::Index(n) * n);
  matrix_.setFromTriplets(triplets.begin(), triplets.end());
  matrix_.makeCompressed();
}

Matrix Superoperator::apply(const Matrix& rho) const {
  const SparseMatrix& h = h_.matrix();
  Matrix out = -kI * (h * rho) + kI * (rho * h);
  for (const auto& c : channels_) {
    if (c.rate == 0) continue;
    const SparseMatrix& o = c.op.matrix();
    Matrix o_rho = o * rho;
    out += c.rate * (o_rho * o.adjoint());
  }
  out -= 0.5 * (jump_sum_ * rho + rho * jump_sum_);
  return out;
}

double Superoperator::min_rate() const {
  double best = 0.0;
  for (const auto& c : channels_)
    if (c.rate > 0 && (best == 0.0 || c.rate < best)) best = c.rate;
  return best;
}

Superoperator liouvillian(const Operator& h, std::vector<CollapseChannel> channels) {
  return {h, std::move(channels)};
}

std::vector<Label> low_lying_labels(const HilbertSpace& space, int max_quanta) {
  std::vector<Label> out;
  for (int na = 0; na <= std::min(max_quanta, space.photon_trunc); ++na)
    for (int nb = 0; nb <= std::min(max_quanta, space.phonon_trunc); ++nb)
      for (int sign : {+1, -1}) out.push_back({na, nb, sign});
  return out;
}

const std::vector<double>& EvolutionResult::series(const std::string& name) const {
  auto it = observables.find(name);
  if (it == observables.end()) throw InvalidArgument("no observable named '" + name + "'");
  return it->second;
}

namespace {

struct ObservableRecorder {
  ObservableRecorder(const HilbertSpace& space, const ObservableSet& set, std::size_t n)
      : set_(set) {
    if (set.occupations) {
      ops_.emplace_back("n_a", number_operator(space, Mode::photon));
      ops_.emplace_back("n_b", number_operator(space, Mode::phonon));
    }
    if (set.parity) ops_.emplace_back("parity", boson_parity_operator(space));
    for (const auto& label : set.populations)
      kets_.emplace_back("P_" + label.str(), dressed_state(space, label).amplitudes());
    for (auto& [name, op] : ops_) out[name].resize(n);
    for (auto& [name, ket] : kets_) out[name].resize(n);
  }

  void record(std::size_t i, const Vector& psi) {
    for (auto& [name, op] : ops_) out[name][i] = psi.dot(op.matrix() * psi).real();
    for (auto& [name, ket] : kets_) out[name][i] = std::norm(ket.dot(psi));
  }

  void record(std::size_t i, const Matrix& rho) {
    for (auto& [name, op] : ops_) out[name][i] = trace_product(op.matrix(), rho).real();
    for (auto& [name, ket] : kets_) out[name][i] = ket.dot(rho * ket).real();
  }

  ObservableSet set_;
  std::vector<std::pair<std::string, Operator>> ops_;
  std::vector<std::pair<std::string, Vector>> kets_;
  std::map<std::string, std::vector<double>> out;
};

constexpr double kNormTolerance = 1e-8;
constexpr int kMaxTightening = 2;

void check_times(const std::vector<double>& times) {
  if (times.empty()) throw InvalidArgument("time grid is empty");
  if (times.front() < 0.0) throw InvalidArgument("sample times must be nonnegative");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (times[i] < times[i - 1]) throw InvalidArgument("time grid must be nondecreasing");
}

}  // namespace

EvolutionResult evolve_closed(const Operator& h, const StateVector& psi0,
                              const std::vector<double>& times, const ObservableSet& observables,
                              IntegratorOptions options) {
  check_times(times);
  if (!(h.space() == psi0.space())) throw InvalidArgument("state and Hamiltonian spaces differ");
  if (max_abs(h - h.adjoint()) > 1e-9) throw InvalidArgument("Hamiltonian must be Hermitian");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw InvalidArgument("initial state must be normalized");

  const SparseMatrix& hm = h.matrix();
  auto rhs = [&hm](double, const Vector& y, Vector& dy) { dy.noalias() = -kI * (hm * y); };
  // Tighten the tolerances until the norm stays within the unitarity bound.
  for (int attempt = 0;; ++attempt) {
    ObservableRecorder recorder(h.space(), observables, times.size());
    std::vector<double> norm(times.size());
    Vector final_psi = integrate<Vector>(
        rhs, psi0.amplitudes(), 0.0, times,
        [&](std::size_t i, double, const Vector& psi) {
          norm[i] = psi.norm();
          recorder.record(i, psi);
        },
        options);
    double drift = 0.0;
    for (double n : norm) drift = std::max(drift, std::abs(n - 1.0));
    if (drift <= kNormTolerance || attempt == kMaxTightening) {
      EvolutionResult result;
      result.times = times;
      result.observables = std::move(recorder.out);
      result.observables["norm"] = std::move(norm);
      result.final_state = StateVector(h.space(), std::move(final_psi));
      return result;
    }
    options.rtol /= 100.0;
    options.atol /= 100.0;
  }
}

EvolutionResult evolve_open(const Superoperator& l, const DensityMatrix& rho0,
                            const std::vector<double>& times, const ObservableSet& observables,
                            IntegratorOptions options) {
  check_times(times);
  if (!(l.space() == rho0.space())) throw InvalidArgument("state and Liouvillian spaces differ");
  const Eigen::Index n = l.space().total_dim();

  ObservableRecorder recorder(l.space(), observables, times.size());
  std::vector<double> trace(times.size()), herm(times.size());
  const Eigen::SparseMatrix<Scalar, Eigen::RowMajor> lm = l.matrix();
  // Only the Hermitian part of each derivative is kept. Real-coefficient
  // combinations of Hermitian matrices stay exactly Hermitian, so roundoff
  // cannot seed an anti-Hermitian component.
  Matrix dag(n, n);
  auto rhs = [&lm, &dag, n](double, const Vector& y, Vector& dy) {
    dy.noalias() = lm * y;
    Eigen::Map<Matrix> d(dy.data(), n, n);
    dag = d.adjoint();
    d = 0.5 * (d + dag);
  };
  const Matrix r0 = rho0.matrix();
  Vector final_vec = integrate<Vector>(
      rhs, vectorize(0.5 * (r0 + r0.adjoint())), 0.0, times,
      [&](std::size_t i, double, const Vector& v) {
        const Matrix rho = unvectorize(v, n);
        trace[i] = rho.trace().real();
        herm[i] = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
        recorder.record(i, rho);
      },
      options);

  EvolutionResult result;
  result.times = times;
  result.observables = std::move(recorder.out);
  result.observables["trace"] = std::move(trace);
  result.observables["hermiticity"] = std::move(herm);
  result.final_density = DensityMatrix(l.space(), unvectorize(final_vec, n));
  return result;
}

double residual_norm(const Superoperator& l, const DensityMatrix& rho) {
  return l.apply(rho.matrix()).cwiseAbs().sum();
}

StateVector dressed_ground(const HilbertSpace& space) { return dressed_state(space, {0, 0, -1}); }

namespace {

// vec L with the first row replaced by the trace functional.
SparseMatrix trace_constrained(const SparseMatrix& lm, Eigen::Index n) {
  std::vector<Triplet> triplets;
  triplets.reserve(std::size_t(lm.nonZeros() + n));
  for (int k = 0; k < lm.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(lm, k); it; ++it)
      if (it.row() != 0) triplets.emplace_back(int(it.row()), int(it.col()), it.value());
  for (Eigen::Index i = 0; i < n; ++i) triplets.emplace_back(0, int(i * n + i), Scalar(1.0));
  SparseMatrix a(lm.rows(), lm.cols());
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  return a;
}

std::optional<Vector> solve_direct(const SparseMatrix& a, const Vector& rhs) {
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) return std::nullopt;
  Vector x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) return std::nullopt;
  return x;
}

std::optional<Vector> solve_iterative(const SparseMatrix& a, const Vector& rhs) {
  Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<Scalar>> solver;
  solver.preconditioner().setDroptol(1e-6);
  solver.setTolerance(1e-14);
  solver.setMaxIterations(2000);
  solver.compute(a);
  if (solver.info() != Eigen::Success) return std::nullopt;
  Vector x = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !x.allFinite()) return std::nullopt;
  return x;
}

DensityMatrix polish(const HilbertSpace& space, const Vector& x) {
  const Eigen::Index n = space.total_dim();
  Matrix rho = unvectorize(x, n);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace().real();
  return {space, std::move(rho)};
}

}  // namespace

DensityMatrix steady_state(const Superoperator& l, const SteadyStateOptions& options) {
  const HilbertSpace& space = l.space();
  const Eigen::Index n = space.total_dim();
  const SparseMatrix a = trace_constrained(l.matrix(), n);
  Vector rhs = Vector::Zero(n * n);
  rhs(0) = 1.0;

  auto acceptable = [&](const DensityMatrix& rho) {
    return residual_norm(l, rho) < options.residual_tol &&
           rho.min_eigenvalue() > -options.positivity_tol;
  };

  std::optional<Vector> x;
  if (n * n > options.direct_limit) x = solve_iterative(a, rhs);
  if (x) {
    DensityMatrix rho = polish(space, *x);
    if (acceptable(rho)) return rho;
  }
  x = solve_direct(a, rhs);
  if (x) {
    DensityMatrix rho = polish(space, *x);
    if (acceptable(rho)) return rho;
  }

  // Fallback: relax the dressed ground state for many slowest lifetimes.
  const double rate = l.min_rate();
  if (rate <= 0.0) throw NumericalError("steady state: no dissipation and linear solve failed");
  const double t_end = 100.0 / rate;
  auto evolved = evolve_open(l, DensityMatrix::pure(dressed_ground(space)), {0.0, t_end},
                             ObservableSet{false, false, {}}, {1e-10, 1e-13});
  DensityMatrix rho = polish(space, vectorize(evolved.final_density->matrix()));
  const double residual = residual_norm(l, rho);
  if (residual > 1e-6 || rho.min_eigenvalue() < -options.positivity_tol)
    throw NumericalError("steady state: no unique stationary state found (residual " +
                         std::to_string(residual) + ")");
  return rho;
}

}  // namespace tripartite
