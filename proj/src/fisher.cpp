#include "stein_wilks/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stein_wilks {

double linf_norm(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double schur_constant(const Matrix& U, const Matrix& D) {
  const Matrix DtU = D.transpose() * U;
  const Matrix DtUD = DtU * D;
  return std::max({linf_norm(U), linf_norm(DtUD), linf_norm(DtU)});
}

namespace {

void require_symmetric(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) throw NotSymmetric(std::string(what) + " is not square");
  if (m.size() == 0) return;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw NotSymmetric(std::string(what) + " asymmetry " + std::to_string(asym));
  }
}

Eigen::LLT<Matrix> checked_cholesky(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite(what);
  const double rcond = llt.rcond();
  if (!(rcond > 0.0) || 1.0 / rcond > kMaxCondition) {
    throw IllConditioned(rcond > 0.0 ? 1.0 / rcond : INFINITY);
  }
  return llt;
}

}  // namespace

Matrix spd_inverse(const Matrix& m, const char* what) {
  if (m.size() == 0) return Matrix(0, 0);
  require_symmetric(m, what);
  const auto llt = checked_cholesky(m, what);
  return llt.solve(Matrix::Identity(m.rows(), m.cols()));
}

Matrix spd_inverse_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
    throw NotPositiveDefinite("inverse square root");
  }
  const Vector inv_sqrt = eig.eigenvalues().cwiseSqrt().cwiseInverse();
  return eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
}

FisherBlocks partition_fisher(const Matrix& info, int r) {
  const int d = static_cast<int>(info.rows());
  if (info.rows() != info.cols() || d < 1) {
    throw DimensionMismatch("Fisher information must be square with d >= 1");
  }
  if (r < 1 || r > d) {
    throw DimensionMismatch("r=" + std::to_string(r) + " outside [1, " + std::to_string(d) + "]");
  }
  require_symmetric(info, "Fisher information");

  FisherBlocks b;
  b.r = r;
  b.full = info;
  const int q = d - r;
  b.A = info.topLeftCorner(r, r);
  b.B = info.topRightCorner(r, q);
  b.C = info.bottomRightCorner(q, q);

  b.full_inverse = spd_inverse(info, "Fisher information");
  if (q > 0) {
    const auto c_llt = checked_cholesky(b.C, "nuisance block C");
    b.C_inverse = c_llt.solve(Matrix::Identity(q, q));
    // D = B C^{-1}  <=>  C D^T = B^T
    b.D = c_llt.solve(b.B.transpose()).transpose();
    const Matrix schur = b.A - b.D * b.B.transpose();
    b.U = spd_inverse(0.5 * (schur + schur.transpose()), "Schur complement A - B C^-1 B^T");
  } else {
    b.C_inverse = Matrix(0, 0);
    b.D = Matrix(r, 0);
    b.U = spd_inverse(b.A, "tested block A");
  }
  b.c = schur_constant(b.U, b.D);
  return b;
}

QuadraticForms quadratic_form_g(const Vector& xi, const Vector& eta, const FisherBlocks& b) {
  const int d = b.dim();
  if (xi.size() != b.r || eta.size() != d - b.r) {
    throw DimensionMismatch("xi/eta sizes do not match the Fisher partition");
  }
  Vector w(d);
  w << xi, eta;
  QuadraticForms g;
  const double nuisance = eta.size() > 0 ? eta.dot(b.C_inverse * eta) : 0.0;
  g.full = w.dot(b.full_inverse * w) - nuisance;
  const Vector centred = xi - b.D * eta;
  g.schur = centred.dot(b.U * centred);
  return g;
}

}  // namespace stein_wilks
