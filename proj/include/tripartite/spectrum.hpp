#pragma once

#include <utility>
#include <vector>

#include "tripartite/model.hpp"

namespace tripartite {

struct Eigensystem {
  RealVector values;  ///< ascending
  Matrix vectors;     ///< orthonormal columns
};

/// Full spectrum of a Hermitian operator; throws InvalidArgument when
/// max|H − H†| exceeds 1e-9.
Eigensystem eigenlevels(const Operator& h);

/// Dominant dressed label of an eigenvector and its squared overlap.
struct LevelLabel {
  Label label;
  double weight = 0.0;
};

LevelLabel dominant_label(const HilbertSpace& space, const Vector& v);

struct LevelScan {
  RealVector omega_grid;
  RealMatrix levels;  ///< (n_levels × grid) E_n − E_0, each column ascending
  std::vector<std::vector<LevelLabel>> labels;  ///< [grid][level]
  /// tracks(k, i): sorted index at grid point i of the curve that starts as
  /// level k at grid point 0, followed by maximal eigenvector overlap.
  Eigen::MatrixXi tracks;
};

/// Eigenlevels of the dressed-frame Hamiltonian at every Ω of the grid.
LevelScan scan_drive(const ModelParams& params, const HilbertSpace& space,
                     const RealVector& omega_grid, int n_levels);

struct Anticrossing {
  double omega_star = 0.0;
  double gap = 0.0;
  std::pair<Label, Label> pair;
  /// Squared overlaps of the two hybridized eigenvectors with the first and
  /// second partner: overlaps(eigvec, partner).
  Eigen::Matrix2d overlaps = Eigen::Matrix2d::Zero();
};

struct AnticrossingOptions {
  double omega_tol = 1e-10;
  /// Each partner must place at least this share of its weight on each of
  /// the two tracked eigenvectors.
  double hybridization = 0.4;
  /// Below this combined weight on the two partners the tracked levels are
  /// considered lost.
  double tracking_floor = 0.5;
  /// A smaller gap is an exact crossing. Its eigenvectors may be rotated
  /// freely, so hybridization is not required there.
  double degenerate_gap = 1e-9;
};

/// Splitting between the two eigenstates that carry the most weight on the
/// given partners at drive amplitude omega.
struct TrackedGap {
  double gap = 0.0;
  Eigen::Matrix2d overlaps = Eigen::Matrix2d::Zero();
};
TrackedGap tracked_gap(const ModelParams& params, const HilbertSpace& space,
                       const std::pair<Label, Label>& pair, double omega);

/// Golden-section minimization of the tracked gap over Ω inside bracket.
Anticrossing locate_anticrossing(const ModelParams& params, const HilbertSpace& space,
                                 const std::pair<Label, Label>& pair,
                                 std::pair<double, double> bracket,
                                 const AnticrossingOptions& options = {});

}  // namespace tripartite
