#include "tripartite/trajectories.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace tripartite {

namespace {

double uniform(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

int quanta_of(ChannelKind kind) { return kind == ChannelKind::photon_pair ? 2 : 1; }

class Recorder {
 public:
  Recorder(const HilbertSpace& space, const TrajectoryOptions& opt, TrajectoryRecord& rec)
      : rec_(rec), keep_(opt.keep_states) {
    if (opt.observables.occupations) {
      ops_.emplace_back("n_a", number_operator(space, Mode::photon));
      ops_.emplace_back("n_b", number_operator(space, Mode::phonon));
    }
    if (opt.observables.parity) ops_.emplace_back("parity", boson_parity_operator(space));
    for (const auto& l : opt.observables.populations)
      kets_.emplace_back("P_" + l.str(), dressed_state(space, l).amplitudes());
    const std::size_t n = opt.sample_times.size();
    rec_.sample_times = opt.sample_times;
    for (auto& [name, op] : ops_) rec_.samples[name].assign(n, 0.0);
    for (auto& [name, ket] : kets_) rec_.samples[name].assign(n, 0.0);
    if (keep_) rec_.states.resize(n);
  }

  void record(std::size_t i, Vector psi) {
    const double nrm = psi.norm();
    if (!(nrm > 0.0)) throw NumericalError("trajectory state collapsed to zero norm");
    psi /= nrm;
    for (auto& [name, op] : ops_) rec_.samples[name][i] = psi.dot(op.matrix() * psi).real();
    for (auto& [name, ket] : kets_) rec_.samples[name][i] = std::norm(ket.dot(psi));
    if (keep_) rec_.states[i] = std::move(psi);
  }

 private:
  TrajectoryRecord& rec_;
  bool keep_;
  std::vector<std::pair<std::string, Operator>> ops_;
  std::vector<std::pair<std::string, Vector>> kets_;
};

// Exact propagation e^{−iH_nh t} = V e^{−iDt} V⁻¹ with ‖ψ(t)‖² = y†(V†V)y.
class SpectralPropagator {
 public:
  static std::optional<SpectralPropagator> make(const Matrix& hnh, double max_condition) {
    Eigen::ComplexEigenSolver<Matrix> es(hnh);
    if (es.info() != Eigen::Success) return std::nullopt;
    SpectralPropagator p;
    p.v_ = es.eigenvectors();
    p.d_ = es.eigenvalues();
    Eigen::JacobiSVD<Matrix> svd(p.v_);
    const auto& sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > 0.0) || sv(0) / sv(sv.size() - 1) > max_condition) return std::nullopt;
    p.vinv_ = p.v_.inverse();
    const double scale = std::max(1.0, hnh.cwiseAbs().maxCoeff());
    const Matrix rebuilt = p.v_ * p.d_.asDiagonal() * p.vinv_;
    if ((rebuilt - hnh).cwiseAbs().maxCoeff() > 1e-9 * scale) return std::nullopt;
    p.gram_ = p.v_.adjoint() * p.v_;
    return p;
  }

  void load(const Vector& psi) { c_ = vinv_ * psi; }

  Vector coefficients(double dt) const {
    return (c_.array() * (-kI * d_.array() * dt).exp()).matrix();
  }
  Vector state(double dt) const { return v_ * coefficients(dt); }
  double norm2(double dt) const {
    const Vector y = coefficients(dt);
    return y.dot(gram_ * y).real();
  }

 private:
  Matrix v_, vinv_, gram_;
  Vector d_, c_;
};

struct JumpContext {
  const std::vector<CollapseChannel>& channels;
  std::mt19937_64& rng;
  TrajectoryRecord& rec;
};

// Applies a jump to the (unnormalized) state and logs it.
Vector jump(JumpContext& ctx, const Vector& psi, double t) {
  std::vector<double> weight;
  std::vector<Vector> images;
  double total = 0.0;
  for (const auto& c : ctx.channels) {
    images.push_back(c.op.matrix() * psi);
    weight.push_back(c.rate * images.back().squaredNorm());
    total += weight.back();
  }
  if (!(total > 0.0)) throw NumericalError("jump requested but every channel has zero weight");
  const double pick = uniform(ctx.rng) * total;
  std::size_t k = weight.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < weight.size() && k == weight.size(); ++i)
    if (weight[i] > 0.0 && pick < (acc += weight[i])) k = i;
  if (k == weight.size())  // rounding pushed pick past the total
    do --k;
    while (weight[k] == 0.0);
  Vector out = images[k] / images[k].norm();
  ctx.rec.events.push_back({t, ctx.channels[k].kind, quanta_of(ctx.channels[k].kind)});
  return out;
}

void run_spectral(const SpectralPropagator& base, JumpContext ctx, const Vector& psi0,
                  double t_max, const TrajectoryOptions& opt, Recorder& recorder) {
  SpectralPropagator prop = base;
  const auto& samples = opt.sample_times;
  std::size_t s = 0;
  double origin = 0.0;
  prop.load(psi0);
  double threshold = uniform(ctx.rng);
  while (true) {
    double t_jump = std::numeric_limits<double>::infinity();
    if (prop.norm2(t_max - origin) <= threshold) {
      double lo = 0.0, hi = t_max - origin;
      while (hi - lo > opt.time_tol) {
        const double mid = 0.5 * (lo + hi);
        (prop.norm2(mid) > threshold ? lo : hi) = mid;
      }
      t_jump = origin + hi;
    }
    while (s < samples.size() && samples[s] < t_jump && samples[s] <= t_max) {
      recorder.record(s, prop.state(samples[s] - origin));
      ++s;
    }
    if (!std::isfinite(t_jump)) break;
    const Vector psi = jump(ctx, prop.state(t_jump - origin), t_jump);
    origin = t_jump;
    prop.load(psi);
    threshold = uniform(ctx.rng);
  }
}

void run_runge_kutta(const Matrix& hnh, JumpContext ctx, const Vector& psi0, double t_max,
                     const TrajectoryOptions& opt, Recorder& recorder) {
  const Matrix gen = -kI * hnh;
  auto rhs = [&gen](double, const Vector& y, Vector& dy) { dy.noalias() = gen * y; };
  DormandPrince<Vector> dp(rhs, opt.integrator);
  const auto& samples = opt.sample_times;
  std::size_t s = 0;
  dp.initialize(0.0, psi0);
  while (s < samples.size() && samples[s] <= 0.0) recorder.record(s++, psi0);
  double threshold = uniform(ctx.rng);
  while (dp.time() < t_max) {
    dp.step(t_max);
    double t_end = dp.time();
    const bool jumped = dp.state().squaredNorm() <= threshold;
    if (jumped) {
      double lo = dp.previous_time(), hi = dp.time();
      while (hi - lo > opt.time_tol) {
        const double mid = 0.5 * (lo + hi);
        (dp.dense(mid).squaredNorm() > threshold ? lo : hi) = mid;
      }
      t_end = hi;
    }
    while (s < samples.size() && (jumped ? samples[s] < t_end : samples[s] <= t_end)) {
      recorder.record(s, dp.dense(samples[s]));
      ++s;
    }
    if (jumped) {
      const Vector psi = jump(ctx, dp.dense(t_end), t_end);
      dp.initialize(t_end, psi);
      threshold = uniform(ctx.rng);
      if (t_end >= t_max)
        while (s < samples.size() && samples[s] <= t_max) recorder.record(s++, psi);
    }
  }
}

}  // namespace

std::vector<TrajectoryRecord> run_trajectories(const Operator& h,
                                               const std::vector<CollapseChannel>& channels,
                                               const StateVector& psi0, double t_max, int n_traj,
                                               std::uint64_t base_seed,
                                               const TrajectoryOptions& options) {
  if (!(t_max > 0)) throw InvalidArgument("t_max must be positive");
  if (n_traj < 1) throw InvalidArgument("n_traj must be at least 1");
  if (!(h.space() == psi0.space())) throw InvalidArgument("state and Hamiltonian spaces differ");
  if (max_abs(h - h.adjoint()) > 1e-9) throw InvalidArgument("Hamiltonian must be Hermitian");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw InvalidArgument("initial state must be normalized");
  const auto& st = options.sample_times;
  for (std::size_t i = 0; i < st.size(); ++i) {
    if (st[i] < 0 || st[i] > t_max) throw InvalidArgument("sample times must lie in [0, t_max]");
    if (i > 0 && st[i] < st[i - 1]) throw InvalidArgument("sample times must be nondecreasing");
  }

  std::vector<CollapseChannel> active;
  Matrix hnh = h.dense();
  for (const auto& c : channels) {
    if (!(c.op.space() == h.space())) throw InvalidArgument("collapse operator on another space");
    if (c.rate < 0) throw InvalidArgument("collapse rates must be non-negative");
    if (c.rate == 0) continue;
    active.push_back(c);
    hnh -= (0.5 * kI * c.rate) * Matrix(c.op.matrix().adjoint() * c.op.matrix());
  }

  std::optional<SpectralPropagator> spectral;
  if (options.propagator != Propagator::runge_kutta) {
    spectral = SpectralPropagator::make(hnh, options.max_condition);
    if (!spectral && options.propagator == Propagator::spectral)
      throw NumericalError("non-Hermitian Hamiltonian is too ill-conditioned to diagonalize");
  }

  std::vector<TrajectoryRecord> out(static_cast<std::size_t>(n_traj));
  for (int j = 0; j < n_traj; ++j) {
    TrajectoryRecord& rec = out[std::size_t(j)];
    rec.seed = base_seed + std::uint64_t(j);
    std::mt19937_64 rng(rec.seed);
    Recorder recorder(h.space(), options, rec);
    JumpContext ctx{active, rng, rec};
    if (spectral)
      run_spectral(*spectral, ctx, psi0.amplitudes(), t_max, options, recorder);
    else
      run_runge_kutta(hnh, ctx, psi0.amplitudes(), t_max, options, recorder);
  }
  return out;
}

namespace {

EnsembleSeries average(const std::vector<TrajectoryRecord>& records,
                       const std::function<double(const TrajectoryRecord&, std::size_t)>& value) {
  if (records.empty()) throw InvalidArgument("ensemble is empty");
  const auto& times = records.front().sample_times;
  for (const auto& r : records)
    if (r.sample_times != times) throw InvalidArgument("records do not share a sample grid");
  const double n = double(records.size());
  EnsembleSeries out;
  out.times = times;
  out.stderr_defined = records.size() > 1;
  for (std::size_t i = 0; i < times.size(); ++i) {
    double sum = 0.0, sq = 0.0;
    for (const auto& r : records) {
      const double v = value(r, i);
      sum += v;
      sq += v * v;
    }
    const double mean = sum / n;
    out.mean.push_back(mean);
    if (records.size() > 1) {
      const double var = std::max(0.0, (sq - n * mean * mean) / (n - 1.0));
      out.stderr_.push_back(std::sqrt(var / n));
    } else {
      out.stderr_.push_back(0.0);
    }
  }
  return out;
}

}  // namespace

EnsembleSeries ensemble_average(const std::vector<TrajectoryRecord>& records,
                                const std::string& observable) {
  for (const auto& r : records)
    if (!r.samples.count(observable))
      throw InvalidArgument("records carry no series named '" + observable + "'");
  return average(records, [&](const TrajectoryRecord& r, std::size_t i) {
    return r.samples.at(observable)[i];
  });
}

EnsembleSeries ensemble_average(const std::vector<TrajectoryRecord>& records, const Operator& op) {
  for (const auto& r : records)
    if (r.states.size() != r.sample_times.size())
      throw InvalidArgument("operator averages need records with kept states");
  return average(records, [&](const TrajectoryRecord& r, std::size_t i) {
    return r.states[i].dot(op.matrix() * r.states[i]).real();
  });
}

EmissionStats count_correlated_emissions(const std::vector<TrajectoryRecord>& records,
                                         double window_T, double coincidence) {
  if (!(coincidence > 0)) throw InvalidArgument("coincidence window must be positive");
  if (!(window_T >= 0)) throw InvalidArgument("window_T must be non-negative");
  EmissionStats out;
  out.window_T = window_T;
  out.n_trajectories = int(records.size());
  for (const auto& rec : records) {
    int count = 0;
    bool photon = false, phonon = false;
    double last = -std::numeric_limits<double>::infinity();
    auto close = [&] {
      if (photon && phonon) ++count;
      photon = phonon = false;
    };
    for (const auto& e : rec.events) {
      if (e.channel == ChannelKind::atom || e.time < 0 || e.time > window_T) continue;
      if (e.time - last > coincidence) close();
      (e.channel == ChannelKind::phonon ? phonon : photon) = true;
      last = e.time;
    }
    close();
    out.per_trajectory.push_back(count);
  }
  if (records.empty()) return out;
  const double n = double(records.size());
  double sum = 0.0, sq = 0.0;
  for (int c : out.per_trajectory) sum += c, sq += double(c) * c;
  out.mean_events = sum / n;
  if (records.size() > 1)
    out.stderr_ = std::sqrt(std::max(0.0, (sq - n * out.mean_events * out.mean_events) / (n - 1.0)) / n);
  return out;
}

double default_coincidence(const ModelParams& params) {
  if (params.kappa_a > 0) return 2.0 / params.kappa_a;
  if (params.kappa_a2 > 0) return 2.0 / params.kappa_a2;
  throw InvalidArgument("default coincidence window needs kappa_a or kappa_a2 > 0");
}

std::map<std::string, std::vector<double>> trajectory_populations(const TrajectoryRecord& record,
                                                                  const HilbertSpace& space,
                                                                  const std::vector<Label>& labels) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& label : labels) {
    const std::string name = "P_" + label.str();
    if (auto it = record.samples.find(name); it != record.samples.end()) {
      out[name] = it->second;
      continue;
    }
    if (record.states.size() != record.sample_times.size() || record.sample_times.empty())
      throw InvalidArgument("population of " + label.str() + " is not available in the record");
    if (label.n_a > space.photon_trunc || label.n_b > space.phonon_trunc)
      throw InvalidArgument("label " + label.str() + " lies outside the truncation");
    const Vector ket = dressed_state(space, label).amplitudes();
    auto& series = out[name];
    for (const auto& psi : record.states) series.push_back(std::norm(ket.dot(psi)));
  }
  return out;
}

}  // namespace tripartite
