#include "tripartite/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tripartite {

Eigensystem eigenlevels(const Operator& h) {
  const Matrix m = h.dense();
  if (m.size() > 0 && (m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
    throw InvalidArgument("eigenlevels needs a Hermitian operator");

  // The model Hamiltonians are real in the chosen basis; the real solver is
  // several times faster and gives the same spectrum.
  if (m.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(m.real());
    if (solver.info() != Eigen::Success) throw NumericalError("eigen-decomposition failed");
    return {solver.eigenvalues(), solver.eigenvectors().cast<Scalar>()};
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) throw NumericalError("eigen-decomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

LevelLabel dominant_label(const HilbertSpace& space, const Vector& v) {
  LevelLabel best;
  const double s = 1.0 / std::sqrt(2.0);
  for (int na = 0; na <= space.photon_trunc; ++na)
    for (int nb = 0; nb <= space.phonon_trunc; ++nb) {
      const Scalar g = v(space.index(0, na, nb)), e = v(space.index(1, na, nb));
      for (int sign : {+1, -1}) {
        const double w = std::norm(s * (g + double(sign) * e));
        if (w > best.weight) best = {{na, nb, sign}, w};
      }
    }
  return best;
}

namespace {

// Greedy assignment of next-step levels to current tracks by overlap.
std::vector<int> match_levels(const Matrix& prev, const Matrix& next) {
  const int n = int(prev.cols());
  const RealMatrix overlap = (prev.adjoint() * next).cwiseAbs();
  std::vector<std::pair<int, int>> order;
  order.reserve(std::size_t(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) order.emplace_back(i, j);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return overlap(a.first, a.second) > overlap(b.first, b.second);
  });
  std::vector<int> match(n, -1);
  std::vector<bool> taken(n, false);
  for (auto [i, j] : order) {
    if (match[i] >= 0 || taken[j]) continue;
    match[i] = j;
    taken[j] = true;
  }
  return match;
}

}  // namespace

LevelScan scan_drive(const ModelParams& params, const HilbertSpace& space,
                     const RealVector& omega_grid, int n_levels) {
  if (n_levels < 1 || n_levels > space.total_dim())
    throw InvalidArgument("n_levels must lie in [1, total_dim]");
  for (Eigen::Index i = 1; i < omega_grid.size(); ++i)
    if (!(omega_grid(i) > omega_grid(i - 1))) throw InvalidArgument("omega grid must be sorted");

  const auto npts = omega_grid.size();
  LevelScan scan;
  scan.omega_grid = omega_grid;
  scan.levels.resize(n_levels, npts);
  scan.labels.resize(std::size_t(npts));
  scan.tracks.resize(n_levels, npts);

  Matrix previous;
  Eigen::VectorXi current(n_levels);
  for (Eigen::Index i = 0; i < npts; ++i) {
    ModelParams p = params;
    p.omega_drive = omega_grid(i);
    const Eigensystem es = eigenlevels(build_h_dressed(p, space));
    const Matrix vecs = es.vectors.leftCols(n_levels);
    for (int k = 0; k < n_levels; ++k) {
      scan.levels(k, i) = es.values(k) - es.values(0);
      scan.labels[std::size_t(i)].push_back(dominant_label(space, vecs.col(k)));
    }
    if (i == 0) {
      std::iota(current.data(), current.data() + n_levels, 0);
    } else {
      const auto match = match_levels(previous, vecs);
      Eigen::VectorXi next(n_levels);
      for (int k = 0; k < n_levels; ++k) next(k) = match[std::size_t(current(k))];
      current = next;
    }
    scan.tracks.col(i) = current;
    previous = vecs;
  }
  return scan;
}

TrackedGap tracked_gap(const ModelParams& params, const HilbertSpace& space,
                       const std::pair<Label, Label>& pair, double omega) {
  ModelParams p = params;
  p.omega_drive = omega;
  const Eigensystem es = eigenlevels(build_h_dressed(p, space));
  const Vector first = dressed_state(space, pair.first).amplitudes();
  const Vector second = dressed_state(space, pair.second).amplitudes();
  const RealVector w1 = (first.adjoint() * es.vectors).cwiseAbs2().transpose();
  const RealVector w2 = (second.adjoint() * es.vectors).cwiseAbs2().transpose();
  const RealVector total = w1 + w2;

  Eigen::Index i = 0, j = 0;
  total.maxCoeff(&i);
  double best = -1.0;
  for (Eigen::Index k = 0; k < total.size(); ++k)
    if (k != i && total(k) > best) best = total(k), j = k;

  TrackedGap out;
  out.gap = std::abs(es.values(i) - es.values(j));
  out.overlaps << w1(i), w2(i), w1(j), w2(j);
  return out;
}

Anticrossing locate_anticrossing(const ModelParams& params, const HilbertSpace& space,
                                 const std::pair<Label, Label>& pair,
                                 std::pair<double, double> bracket,
                                 const AnticrossingOptions& options) {
  auto [lo, hi] = bracket;
  if (!(hi > lo)) throw InvalidArgument("anticrossing bracket must satisfy lo < hi");
  if (pair.first == pair.second) throw InvalidArgument("anticrossing pair must be distinct");
  auto gap_at = [&](double omega) { return tracked_gap(params, space, pair, omega).gap; };

  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - ratio * (b - a), x2 = a + ratio * (b - a);
  double f1 = gap_at(x1), f2 = gap_at(x2);
  while (b - a > options.omega_tol) {
    if (f1 <= f2) {
      b = x2, x2 = x1, f2 = f1;
      x1 = b - ratio * (b - a), f1 = gap_at(x1);
    } else {
      a = x1, x1 = x2, f1 = f2;
      x2 = a + ratio * (b - a), f2 = gap_at(x2);
    }
  }
  const double omega = 0.5 * (a + b);
  const double edge = 1e-6 * (hi - lo);
  if (omega - lo < edge || hi - omega < edge)
    throw NumericalError("no gap minimum inside the bracket [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");

  const TrackedGap at = tracked_gap(params, space, pair, omega);
  for (int v = 0; v < 2; ++v) {
    const double total = at.overlaps(v, 0) + at.overlaps(v, 1);
    if (total < options.tracking_floor)
      throw NumericalError("lost track of " + pair.first.str() + "/" + pair.second.str() +
                           ": combined overlap " + std::to_string(total));
    for (int p = 0; p < 2 && at.gap >= options.degenerate_gap; ++p)
      if (at.overlaps(v, p) / at.overlaps.col(p).sum() < options.hybridization)
        throw NumericalError("levels " + pair.first.str() + "/" + pair.second.str() +
                             " are not hybridized at the located minimum");
  }
  return {omega, at.gap, pair, at.overlaps};
}

}  // namespace tripartite
