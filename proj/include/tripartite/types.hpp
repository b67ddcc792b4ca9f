#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace tripartite {

using Scalar = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<Scalar>;
using Triplet = Eigen::Triplet<Scalar>;

inline constexpr Scalar kI{0.0, 1.0};

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: invalid parameters, truncations, labels, mismatched spaces.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical stage failed (integration, factorization, root finding).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace tripartite
