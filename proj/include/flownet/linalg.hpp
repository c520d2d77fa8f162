#pragma once

#include <Eigen/Dense>

namespace flownet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Relative singular-value cutoff used by the pseudoinverse and null space.
inline constexpr double kDefaultPinvTol = 1e-12;

/// Throws ValidationError if any entry is NaN or infinite.
void require_finite(const Matrix& a, const char* what);
void require_finite(const Vector& v, const char* what);

/// Moore-Penrose pseudoinverse via SVD. Singular values below
/// tol * sigma_max are treated as zero.
Matrix pseudoinverse(const Matrix& a, double tol = kDefaultPinvTol);

/// Induced 2-norm (largest singular value). Zero for empty matrices.
double spectral_norm(const Matrix& a);

/// Minimum-norm solution of a x = b. Throws InconsistentSystemError when
/// the residual exceeds tol * max(1, |b|).
Vector least_norm_solve(const Matrix& a, const Vector& b, double tol = 1e-9,
                        double pinv_tol = kDefaultPinvTol);

/// Orthonormal basis of ker(a), one column per null direction.
Matrix null_space(const Matrix& a, double tol = kDefaultPinvTol);

/// Inverse of a small square matrix. Throws SingularMatrixError when the
/// reciprocal condition estimate falls below rcond_min.
Matrix inverse(const Matrix& a, double rcond_min = 1e-14);

/// Smallest singular value.
double min_singular_value(const Matrix& a);

struct LpSolution {
  enum class Status { kOptimal, kUnbounded };
  Status status = Status::kOptimal;
  Vector x;
  double objective = 0.0;
};

/// maximize c'x subject to A x <= b with x free. Requires b >= 0 so that
/// x = 0 is feasible; dense tableau simplex with Bland's rule.
LpSolution maximize_lp(const Vector& c, const Matrix& a, const Vector& b);

}  // namespace flownet
