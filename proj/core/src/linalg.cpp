#include "blat/linalg.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "blat/errors.hpp"

namespace blat::linalg {

bool is_square(const Matrix& a) noexcept { return a.rows() == a.cols(); }

bool is_symmetric(const Matrix& a, double tol) noexcept {
  if (!is_square(a)) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

Eigen::LLT<Matrix> cholesky(const Matrix& a, std::string_view name) {
  if (!is_square(a) || a.rows() == 0) {
    throw Error(ErrorCode::ShapeMismatch, std::string(name), "expected a non-empty square matrix");
  }
  if (!is_symmetric(a)) {
    throw Error(ErrorCode::NotPositiveDefinite, std::string(name), "matrix is not symmetric");
  }
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success || !llt.matrixL().toDenseMatrix().diagonal().allFinite()) {
    throw Error(ErrorCode::NotPositiveDefinite, std::string(name), "Cholesky factorization failed");
  }
  return llt;
}

bool is_positive_definite(const Matrix& a) noexcept {
  if (!is_square(a) || a.rows() == 0 || !is_symmetric(a)) return false;
  Eigen::LLT<Matrix> llt(a);
  return llt.info() == Eigen::Success;
}

Matrix spd_inverse(const Matrix& a, std::string_view name) {
  auto llt = cholesky(a, name);
  return symmetrize(llt.solve(Matrix::Identity(a.rows(), a.cols())));
}

double condition_number(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  const double lo = ev.minCoeff();
  const double hi = ev.maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

Eigen::LLT<Matrix> factor_precision(const Matrix& precision, std::string_view name) {
  if (!is_square(precision)) {
    throw Error(ErrorCode::ShapeMismatch, std::string(name), "precision must be square");
  }
  const double cond = condition_number(symmetrize(precision));
  if (!(cond <= kMaxConditionNumber)) {
    throw Error(ErrorCode::SingularMatrix, std::string(name),
                "condition number " + std::to_string(cond) + " exceeds 1e12");
  }
  Eigen::LLT<Matrix> llt(symmetrize(precision));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularMatrix, std::string(name), "Cholesky factorization failed");
  }
  return llt;
}

void require_shape(const Matrix& a, Index rows, Index cols, std::string_view name) {
  if (a.rows() != rows || a.cols() != cols) {
    throw Error(ErrorCode::ShapeMismatch, std::string(name),
                "expected " + std::to_string(rows) + "x" + std::to_string(cols) + ", got " +
                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

void require_size(const Vector& v, Index size, std::string_view name) {
  if (v.size() != size) {
    throw Error(ErrorCode::ShapeMismatch, std::string(name),
                "expected length " + std::to_string(size) + ", got " + std::to_string(v.size()));
  }
}

}  // namespace blat::linalg
