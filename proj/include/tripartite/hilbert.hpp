#pragma once

#include <string>
#include <string_view>

#include "tripartite/types.hpp"

namespace tripartite {

/// Truncated atom ⊗ photon ⊗ phonon space.
///
/// Basis ordering is fixed: the atom is the slowest index (0 = |g⟩, 1 = |e⟩),
/// then the photon number, then the phonon number (fastest).
///   index = atom·(N_a+1)(N_b+1) + n_a·(N_b+1) + n_b
struct HilbertSpace {
  int photon_trunc = 1;  ///< highest photon Fock level N_a
  int phonon_trunc = 1;  ///< highest phonon Fock level N_b

  static constexpr int atom_dim = 2;

  int photon_dim() const { return photon_trunc + 1; }
  int phonon_dim() const { return phonon_trunc + 1; }
  int total_dim() const { return atom_dim * photon_dim() * phonon_dim(); }

  struct BasisState {
    int atom;
    int n_a;
    int n_b;
    bool operator==(const BasisState&) const = default;
  };

  int index(int atom, int n_a, int n_b) const;
  BasisState decode(int index) const;

  bool operator==(const HilbertSpace&) const = default;
};

HilbertSpace build_space(int photon_trunc, int phonon_trunc);

/// Dressed-atom product label |n_a n_b ±⟩ with |±⟩ = (|g⟩ ± |e⟩)/√2.
struct Label {
  int n_a = 0;
  int n_b = 0;
  int sign = +1;  ///< +1 for |+⟩, -1 for |−⟩

  int boson_parity() const { return (n_a + n_b) % 2 == 0 ? +1 : -1; }
  std::string str() const;  ///< e.g. "11-"
  bool operator==(const Label&) const = default;
};

/// Parses "11-", "0,0,+" or "(2,2,-)".
Label parse_label(std::string_view text);

class Operator {
 public:
  Operator(HilbertSpace space, SparseMatrix matrix);

  const HilbertSpace& space() const { return space_; }
  const SparseMatrix& matrix() const { return matrix_; }
  Matrix dense() const { return Matrix(matrix_); }

  Operator adjoint() const;
  Vector apply(const Vector& v) const;

  Operator& operator+=(const Operator& other);
  Operator& operator-=(const Operator& other);
  Operator& operator*=(Scalar s);

  friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
  friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
  friend Operator operator*(Scalar s, Operator op) { return op *= s; }
  friend Operator operator*(Operator op, Scalar s) { return op *= s; }
  friend Operator operator*(const Operator& lhs, const Operator& rhs);

 private:
  HilbertSpace space_;
  SparseMatrix matrix_;
};

Operator identity(const HilbertSpace& space);
Operator commutator(const Operator& a, const Operator& b);
/// Largest absolute matrix element.
double max_abs(const Operator& op);

enum class Mode { photon, phonon };
enum class AtomKind { lowering, sigma_z, dressed_lowering, dressed_sigma_z };

/// Annihilation operator of the chosen mode, ⟨n−1|a|n⟩ = √n.
Operator ladder_operator(const HilbertSpace& space, Mode mode);
Operator number_operator(const HilbertSpace& space, Mode mode);

/// Atomic operators embedded with identity on both modes. The bare lowering
/// operator is |g⟩⟨e| and σ_z = |e⟩⟨e| − |g⟩⟨g|; the dressed kinds act on
/// |±⟩ = (|g⟩ ± |e⟩)/√2 as σ̃ = |−⟩⟨+| and σ̃_z = |+⟩⟨+| − |−⟩⟨−|.
Operator atom_operator(const HilbertSpace& space, AtomKind kind);

class StateVector {
 public:
  StateVector(HilbertSpace space, Vector amplitudes);

  const HilbertSpace& space() const { return space_; }
  const Vector& amplitudes() const { return amplitudes_; }
  Vector& amplitudes() { return amplitudes_; }

  double norm() const { return amplitudes_.norm(); }
  StateVector& normalize();

 private:
  HilbertSpace space_;
  Vector amplitudes_;
};

StateVector basis_state(const HilbertSpace& space, int atom, int n_a, int n_b);
StateVector dressed_state(const HilbertSpace& space, const Label& label);

class DensityMatrix {
 public:
  DensityMatrix(HilbertSpace space, Matrix matrix);
  static DensityMatrix pure(const StateVector& psi);

  const HilbertSpace& space() const { return space_; }
  const Matrix& matrix() const { return matrix_; }

  Scalar trace() const { return matrix_.trace(); }
  double hermiticity_error() const;
  double min_eigenvalue() const;

 private:
  HilbertSpace space_;
  Matrix matrix_;
};

Scalar expectation(const Operator& op, const StateVector& psi);
Scalar expectation(const Operator& op, const DensityMatrix& rho);
/// Tr[op·X] for an arbitrary (not necessarily physical) operand X.
Scalar trace_product(const SparseMatrix& op, const Matrix& x);

/// |⟨label|ψ⟩|².
double population(const StateVector& psi, const Label& label);
double population(const DensityMatrix& rho, const Label& label);

}  // namespace tripartite
