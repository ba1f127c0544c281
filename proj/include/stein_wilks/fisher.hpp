#pragma once

#include <Eigen/Dense>

#include "stein_wilks/errors.hpp"

namespace stein_wilks {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Partition of the Fisher information into the tested block A (r x r), the
// cross block B (r x (d-r)) and the nuisance block C ((d-r) x (d-r)), with
//   U = (A - B C^{-1} B^T)^{-1},  D = B C^{-1},
//   c = max(|||U|||, |||D^T U D|||, |||D^T U|||)  (max absolute row sum).
// When r == d, B and C are empty and U = A^{-1}.
struct FisherBlocks {
  Matrix full;
  Matrix A, B, C;
  Matrix U, D;
  Matrix full_inverse;
  Matrix C_inverse;
  double c = 0.0;
  int r = 0;

  int dim() const { return static_cast<int>(full.rows()); }
};

inline constexpr double kMaxCondition = 1e12;

// Maximum absolute row sum; zero for matrices without rows or columns.
double linf_norm(const Matrix& m);

double schur_constant(const Matrix& U, const Matrix& D);

// Cholesky inverse of a symmetric positive definite matrix with a condition
// guard. `what` names the matrix in error messages.
Matrix spd_inverse(const Matrix& m, const char* what);

// Symmetric inverse square root via eigen-decomposition.
Matrix spd_inverse_sqrt(const Matrix& m);

FisherBlocks partition_fisher(const Matrix& info, int r);

struct QuadraticForms {
  double full = 0.0;   // (xi, eta)^T I^{-1} (xi, eta) - eta^T C^{-1} eta
  double schur = 0.0;  // (xi - D eta)^T U (xi - D eta)
};

QuadraticForms quadratic_form_g(const Vector& xi, const Vector& eta, const FisherBlocks& blocks);

}  // namespace stein_wilks
