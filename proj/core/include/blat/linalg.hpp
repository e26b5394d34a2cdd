#pragma once

#include <string_view>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace blat {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Largest tolerated eigenvalue ratio for a precision matrix before it is
/// treated as numerically singular.
inline constexpr double kMaxConditionNumber = 1e12;

namespace linalg {

bool is_square(const Matrix& a) noexcept;
bool is_symmetric(const Matrix& a, double tol = 1e-10) noexcept;

/// (A + Aᵀ)/2.
Matrix symmetrize(const Matrix& a);

/// Cholesky factor of an SPD matrix; throws NotPositiveDefinite(name).
Eigen::LLT<Matrix> cholesky(const Matrix& a, std::string_view name);

/// True when the Cholesky factorization succeeds (no jitter is applied).
bool is_positive_definite(const Matrix& a) noexcept;

/// A⁻¹ through a Cholesky solve against the identity.
Matrix spd_inverse(const Matrix& a, std::string_view name);

/// Ratio of extreme eigenvalues of a symmetric matrix; +inf when the
/// smallest eigenvalue is not positive.
double condition_number(const Matrix& symmetric);

/// Cholesky factor of a precision matrix, rejecting it as SingularMatrix(name)
/// when its condition number exceeds kMaxConditionNumber.
Eigen::LLT<Matrix> factor_precision(const Matrix& precision, std::string_view name);

/// Throws ShapeMismatch(name) unless a has the given shape.
void require_shape(const Matrix& a, Index rows, Index cols, std::string_view name);
void require_size(const Vector& v, Index size, std::string_view name);

}  // namespace linalg
}  // namespace blat
