#pragma once

// Dense reference constructions built independently of the library so that
// tests compare against hand-assembled matrices.

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

namespace ref {

using C = std::complex<double>;
using M = Eigen::MatrixXcd;

inline M kron(const M& a, const M& b) {
  M out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline M eye(int n) { return M::Identity(n, n); }

inline M destroy(int levels) {
  M a = M::Zero(levels, levels);
  for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

// Atom basis {|g⟩, |e⟩}.
inline M sigma_minus() {
  M s = M::Zero(2, 2);
  s(0, 1) = 1.0;
  return s;
}

inline M sigma_z() {
  M s = M::Zero(2, 2);
  s(0, 0) = -1.0;
  s(1, 1) = 1.0;
  return s;
}

// Embeds atom, photon and phonon factors with the atom slowest.
inline M embed(const M& atom, const M& photon, const M& phonon) {
  return kron(kron(atom, photon), phonon);
}

// Effective Hamiltonian assembled term by term from dense factors.
inline M h_eff(int na, int nb, double delta_a, double delta_s, double wb, double lambda,
               double omega) {
  const M a = destroy(na + 1), b = destroy(nb + 1), s = sigma_minus();
  const M ia = eye(na + 1), ib = eye(nb + 1), i2 = eye(2);
  const M A = embed(i2, a, ib), B = embed(i2, ia, b), S = embed(s, ia, ib);
  const M Sz = embed(sigma_z(), ia, ib);
  return delta_a * A.adjoint() * A + 0.5 * delta_s * Sz + wb * B.adjoint() * B +
         lambda * (A.adjoint() * S + A * S.adjoint()) * (B.adjoint() + B) +
         omega * (S + S.adjoint());
}

inline M random_density(int dim, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  M x(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) x(i, j) = C(g(rng), g(rng));
  M rho = x * x.adjoint();
  return rho / rho.trace();
}

inline M random_hermitian(int dim, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  M x(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) x(i, j) = C(g(rng), g(rng));
  return 0.5 * (x + x.adjoint());
}

}  // namespace ref
