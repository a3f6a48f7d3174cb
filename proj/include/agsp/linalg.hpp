#pragma once

#include <Eigen/Dense>

#include <string>

#include "agsp/errors.hpp"

namespace agsp::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// U^T diag(w) U for a tall U.
inline Matrix weighted_gram(const Matrix& u, const Vector& w) {
  return u.transpose() * w.asDiagonal() * u;
}

inline Vector symmetric_eigenvalues(const Matrix& m) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

inline double min_eigenvalue(const Matrix& m) { return symmetric_eigenvalues(m)(0); }

inline double max_eigenvalue(const Matrix& m) {
  const Vector ev = symmetric_eigenvalues(m);
  return ev(ev.size() - 1);
}

/// Cholesky factor of a symmetric matrix; throws ReconstructabilityError when
/// the matrix is not numerically positive definite.
inline Eigen::LLT<Matrix> spd_factor(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw ReconstructabilityError(std::string(what) + ": matrix is not positive definite");
  }
  return llt;
}

/// Cholesky factor that also rejects matrices whose eigenvalue spread exceeds
/// `max_condition`; used wherever U_F^T diag(p) U_F must be inverted.
inline Eigen::LLT<Matrix> invertible_factor(const Matrix& m, const char* what, double max_condition = 1e12) {
  const Vector ev = symmetric_eigenvalues(m);
  if (!(ev(0) > ev(ev.size() - 1) / max_condition)) {
    throw ReconstructabilityError(std::string(what) + ": U_F^T diag(p) U_F is singular");
  }
  return spd_factor(m, what);
}

}  // namespace agsp::linalg
