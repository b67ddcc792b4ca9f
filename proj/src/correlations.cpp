#include "tripartite/correlations.hpp"

#include <cmath>

namespace tripartite {

namespace {

// Tr[op · X] with X stored column-stacked.
Scalar trace_against_vec(const SparseMatrix& op, const Vector& x, Eigen::Index n) {
  Scalar acc = 0.0;
  for (int k = 0; k < op.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(op, k); it; ++it)
      acc += it.value() * x(it.row() * n + it.col());  // op_ij X_ji
  return acc;
}

}  // namespace

CorrelationSeries two_time_correlation(const Superoperator& l, const DensityMatrix& rho_ss,
                                       const Operator& op, const std::vector<double>& tau,
                                       IntegratorOptions options, double stationarity_tol) {
  if (!(l.space() == rho_ss.space()) || !(l.space() == op.space()))
    throw InvalidArgument("correlation inputs live on different spaces");
  if (tau.empty() || tau.front() != 0.0) throw InvalidArgument("tau grid must start at 0");
  for (std::size_t i = 1; i < tau.size(); ++i)
    if (tau[i] < tau[i - 1]) throw InvalidArgument("tau grid must be nondecreasing");
  const double residual = residual_norm(l, rho_ss);
  if (residual > stationarity_tol)
    throw InvalidArgument("density matrix is not stationary (residual " +
                          std::to_string(residual) + ")");

  const Eigen::Index n = l.space().total_dim();
  const Matrix seed = rho_ss.matrix() * op.adjoint().matrix();
  // Absolute tolerance scaled to the seed, which may be far below unit size.
  const double scale = seed.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    CorrelationSeries zero;
    zero.tau = Eigen::Map<const RealVector>(tau.data(), Eigen::Index(tau.size()));
    zero.values = Vector::Zero(zero.tau.size());
    return zero;
  }
  options.atol *= scale;

  CorrelationSeries out;
  out.tau = Eigen::Map<const RealVector>(tau.data(), Eigen::Index(tau.size()));
  out.values.resize(out.tau.size());
  const Eigen::SparseMatrix<Scalar, Eigen::RowMajor> lm = l.matrix();
  auto rhs = [&lm](double, const Vector& y, Vector& dy) { dy.noalias() = lm * y; };
  const SparseMatrix& a = op.matrix();
  integrate<Vector>(
      rhs, vectorize(seed), 0.0, tau,
      [&](std::size_t i, double, const Vector& x) { out.values(Eigen::Index(i)) = trace_against_vec(a, x, n); },
      options);
  return out;
}

SpectrumSeries emission_spectrum(const CorrelationSeries& corr, const RealVector& omega,
                                 double decay_tol) {
  const Eigen::Index m = corr.tau.size();
  if (m < 2 || corr.values.size() != m) throw InvalidArgument("correlation series is too short");
  SpectrumSeries out{omega, RealVector::Zero(omega.size())};
  const double c0 = std::abs(corr.values(0));
  if (c0 == 0.0 && corr.values.cwiseAbs().maxCoeff() == 0.0) return out;
  if (std::abs(corr.values(m - 1)) >= decay_tol * c0)
    throw NumericalError("correlation has not decayed by tau_max (|C(tau_max)|/|C(0)| = " +
                         std::to_string(std::abs(corr.values(m - 1)) / c0) + ")");

  RealVector weight(m);
  weight.setZero();
  for (Eigen::Index k = 0; k + 1 < m; ++k) {
    const double h = corr.tau(k + 1) - corr.tau(k);
    weight(k) += h / 2.0;
    weight(k + 1) += h / 2.0;
  }
  for (Eigen::Index j = 0; j < omega.size(); ++j) {
    const Vector phase = (kI * omega(j) * corr.tau.cast<Scalar>()).array().exp().matrix();
    const Scalar integral = (phase.array() * corr.values.array() * weight.cast<Scalar>().array()).sum();
    out.values(j) = 2.0 * integral.real();
  }
  return out;
}

double cross_g2(const DensityMatrix& rho) {
  const HilbertSpace& space = rho.space();
  const Operator a = ladder_operator(space, Mode::photon);
  const Operator b = ladder_operator(space, Mode::phonon);
  const Operator na = a.adjoint() * a, nb = b.adjoint() * b;
  const double mean_a = expectation(na, rho).real();
  const double mean_b = expectation(nb, rho).real();
  if (mean_a < 1e-14 || mean_b < 1e-14)
    throw InvalidArgument("cross_g2 undefined for vanishing mean occupation");
  const double joint = expectation(na * nb, rho).real();  // a†b†ba = a†a b†b
  return joint / (mean_a * mean_b);
}

SpectralPeak spectral_peak(const SpectrumSeries& s, double lo, double hi) {
  SpectralPeak best;
  bool found = false;
  for (Eigen::Index j = 0; j < s.omega.size(); ++j) {
    if (s.omega(j) < lo || s.omega(j) > hi) continue;
    if (!found || s.values(j) > best.value) best = {s.omega(j), s.values(j), j};
    found = true;
  }
  if (!found) throw InvalidArgument("no spectral samples inside the peak window");
  return best;
}

std::vector<double> tau_grid(double tau_max, int min_points, double max_step) {
  if (!(tau_max > 0) || min_points < 2 || !(max_step > 0))
    throw InvalidArgument("tau grid needs tau_max > 0, at least 2 points and a positive step");
  const long points = std::max<long>(min_points, long(std::ceil(tau_max / max_step)) + 1);
  std::vector<double> out(static_cast<std::size_t>(points));
  for (long k = 0; k < points; ++k) out[std::size_t(k)] = tau_max * double(k) / double(points - 1);
  return out;
}

}  // namespace tripartite
