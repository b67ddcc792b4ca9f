#include "tripartite/hilbert.hpp"

#include <cctype>
#include <cmath>
#include <vector>

namespace tripartite {

namespace {

void require_same_space(const HilbertSpace& a, const HilbertSpace& b) {
  if (!(a == b)) throw InvalidArgument("operands live on different Hilbert spaces");
}

// Embeds a single-factor matrix (given by its nonzeros) into the full space.
template <class Element>
SparseMatrix embed(const HilbertSpace& space, int factor, Element&& element) {
  const int dims[3] = {HilbertSpace::atom_dim, space.photon_dim(), space.phonon_dim()};
  const int n = space.total_dim();
  std::vector<Triplet> triplets;
  for (int col = 0; col < n; ++col) {
    auto s = space.decode(col);
    int levels[3] = {s.atom, s.n_a, s.n_b};
    for (int row_level = 0; row_level < dims[factor]; ++row_level) {
      Scalar v = element(row_level, levels[factor]);
      if (v == Scalar(0.0)) continue;
      int out[3] = {levels[0], levels[1], levels[2]};
      out[factor] = row_level;
      triplets.emplace_back(space.index(out[0], out[1], out[2]), col, v);
    }
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

}  // namespace

int HilbertSpace::index(int atom, int n_a, int n_b) const {
  if (atom < 0 || atom >= atom_dim || n_a < 0 || n_a > photon_trunc || n_b < 0 ||
      n_b > phonon_trunc)
    throw InvalidArgument("basis state outside the truncated space");
  return (atom * photon_dim() + n_a) * phonon_dim() + n_b;
}

HilbertSpace::BasisState HilbertSpace::decode(int idx) const {
  if (idx < 0 || idx >= total_dim()) throw InvalidArgument("basis index out of range");
  const int n_b = idx % phonon_dim();
  idx /= phonon_dim();
  return {idx / photon_dim(), idx % photon_dim(), n_b};
}

HilbertSpace build_space(int photon_trunc, int phonon_trunc) {
  if (photon_trunc < 1 || phonon_trunc < 1)
    throw InvalidArgument("truncations must be at least 1 (got " + std::to_string(photon_trunc) +
                          ", " + std::to_string(phonon_trunc) + ")");
  return HilbertSpace{photon_trunc, phonon_trunc};
}

std::string Label::str() const {
  return std::to_string(n_a) + std::to_string(n_b) + (sign > 0 ? "+" : "-");
}

Label parse_label(std::string_view text) {
  std::vector<int> numbers;
  int sign = 0;
  std::string digits;
  auto flush = [&] {
    if (!digits.empty()) numbers.push_back(std::stoi(digits));
    digits.clear();
  };
  const bool separated = text.find(',') != std::string_view::npos;
  for (char c : text) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits += c;
      if (!separated) flush();
    } else if (c == '+' || c == '-') {
      flush();
      sign = c == '+' ? +1 : -1;
    } else if (c == ',' || c == '(' || c == ')' || c == ' ') {
      flush();
    } else {
      throw InvalidArgument("unrecognized label '" + std::string(text) + "'");
    }
  }
  flush();
  if (numbers.size() != 2 || sign == 0)
    throw InvalidArgument("label must look like \"11-\" or \"1,1,-\": '" + std::string(text) + "'");
  return {numbers[0], numbers[1], sign};
}

Operator::Operator(HilbertSpace space, SparseMatrix matrix)
    : space_(space), matrix_(std::move(matrix)) {
  if (matrix_.rows() != space_.total_dim() || matrix_.cols() != space_.total_dim())
    throw InvalidArgument("operator dimension does not match its space");
  matrix_.makeCompressed();
}

Operator Operator::adjoint() const { return {space_, SparseMatrix(matrix_.adjoint())}; }

Vector Operator::apply(const Vector& v) const {
  if (v.size() != matrix_.cols()) throw InvalidArgument("vector length does not match operator");
  return matrix_ * v;
}

Operator& Operator::operator+=(const Operator& other) {
  require_same_space(space_, other.space_);
  matrix_ += other.matrix_;
  return *this;
}

Operator& Operator::operator-=(const Operator& other) {
  require_same_space(space_, other.space_);
  matrix_ -= other.matrix_;
  return *this;
}

Operator& Operator::operator*=(Scalar s) {
  matrix_ *= s;
  return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
  require_same_space(lhs.space_, rhs.space_);
  return {lhs.space_, SparseMatrix(lhs.matrix_ * rhs.matrix_)};
}

Operator identity(const HilbertSpace& space) {
  SparseMatrix m(space.total_dim(), space.total_dim());
  m.setIdentity();
  return {space, std::move(m)};
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

double max_abs(const Operator& op) {
  double best = 0.0;
  const auto& m = op.matrix();
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) best = std::max(best, std::abs(it.value()));
  return best;
}

Operator ladder_operator(const HilbertSpace& space, Mode mode) {
  const int factor = mode == Mode::photon ? 1 : 2;
  return {space, embed(space, factor, [](int row, int col) {
            return row == col - 1 ? Scalar(std::sqrt(double(col))) : Scalar(0.0);
          })};
}

Operator number_operator(const HilbertSpace& space, Mode mode) {
  const int factor = mode == Mode::photon ? 1 : 2;
  return {space, embed(space, factor, [](int row, int col) {
            return row == col ? Scalar(double(col)) : Scalar(0.0);
          })};
}

Operator atom_operator(const HilbertSpace& space, AtomKind kind) {
  // 2x2 blocks in the {|g⟩, |e⟩} basis.
  Eigen::Matrix2d block;
  switch (kind) {
    case AtomKind::lowering:  // |g⟩⟨e|
      block << 0, 1, 0, 0;
      break;
    case AtomKind::sigma_z:  // |e⟩⟨e| − |g⟩⟨g|
      block << -1, 0, 0, 1;
      break;
    case AtomKind::dressed_lowering:  // |−⟩⟨+| = (|g⟩−|e⟩)(⟨g|+⟨e|)/2
      block << 0.5, 0.5, -0.5, -0.5;
      break;
    case AtomKind::dressed_sigma_z:  // |+⟩⟨+| − |−⟩⟨−| = σ_x
      block << 0, 1, 1, 0;
      break;
  }
  return {space, embed(space, 0, [&](int row, int col) { return Scalar(block(row, col)); })};
}

StateVector::StateVector(HilbertSpace space, Vector amplitudes)
    : space_(space), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != space_.total_dim())
    throw InvalidArgument("state length does not match its space");
}

StateVector& StateVector::normalize() {
  const double n = norm();
  if (n == 0.0) throw NumericalError("cannot normalize a zero state");
  amplitudes_ /= n;
  return *this;
}

StateVector basis_state(const HilbertSpace& space, int atom, int n_a, int n_b) {
  Vector v = Vector::Zero(space.total_dim());
  v(space.index(atom, n_a, n_b)) = 1.0;
  return {space, std::move(v)};
}

StateVector dressed_state(const HilbertSpace& space, const Label& label) {
  if (label.sign != 1 && label.sign != -1) throw InvalidArgument("label sign must be ±1");
  Vector v = Vector::Zero(space.total_dim());
  const double s = 1.0 / std::sqrt(2.0);
  v(space.index(0, label.n_a, label.n_b)) = s;
  v(space.index(1, label.n_a, label.n_b)) = label.sign * s;
  return {space, std::move(v)};
}

DensityMatrix::DensityMatrix(HilbertSpace space, Matrix matrix)
    : space_(space), matrix_(std::move(matrix)) {
  if (matrix_.rows() != space_.total_dim() || matrix_.cols() != space_.total_dim())
    throw InvalidArgument("density matrix dimension does not match its space");
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  return {psi.space(), psi.amplitudes() * psi.amplitudes().adjoint()};
}

double DensityMatrix::hermiticity_error() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  Matrix h = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

Scalar expectation(const Operator& op, const StateVector& psi) {
  require_same_space(op.space(), psi.space());
  return psi.amplitudes().dot(op.matrix() * psi.amplitudes());
}

Scalar trace_product(const SparseMatrix& op, const Matrix& x) {
  Scalar sum = 0.0;
  for (int k = 0; k < op.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(op, k); it; ++it) sum += it.value() * x(it.col(), it.row());
  return sum;
}

Scalar expectation(const Operator& op, const DensityMatrix& rho) {
  require_same_space(op.space(), rho.space());
  return trace_product(op.matrix(), rho.matrix());
}

double population(const StateVector& psi, const Label& label) {
  return std::norm(dressed_state(psi.space(), label).amplitudes().dot(psi.amplitudes()));
}

double population(const DensityMatrix& rho, const Label& label) {
  const Vector v = dressed_state(rho.space(), label).amplitudes();
  return v.dot(rho.matrix() * v).real();
}

}  // namespace tripartite
