#include "flownet/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "flownet/errors.hpp"

namespace flownet {

namespace {

Eigen::JacobiSVD<Matrix> full_svd(const Matrix& a) {
  return Eigen::JacobiSVD<Matrix>(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

}  // namespace

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) {
    throw ValidationError(std::string(what) + ": non-finite entry");
  }
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw ValidationError(std::string(what) + ": non-finite entry");
  }
}

Matrix pseudoinverse(const Matrix& a, double tol) {
  require_finite(a, "pseudoinverse");
  if (tol < 0.0) throw ValidationError("pseudoinverse: negative tolerance");
  if (a.size() == 0) return Matrix::Zero(a.cols(), a.rows());

  const auto svd = full_svd(a);
  const Vector& s = svd.singularValues();
  const double cutoff = tol * s(0);
  Matrix result = Matrix::Zero(a.cols(), a.rows());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && s(i) > 0.0) {
      result += (svd.matrixV().col(i) / s(i)) * svd.matrixU().col(i).transpose();
    }
  }
  return result;
}

double spectral_norm(const Matrix& a) {
  require_finite(a, "spectral_norm");
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double min_singular_value(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& s = svd.singularValues();
  return s(s.size() - 1);
}

Vector least_norm_solve(const Matrix& a, const Vector& b, double tol, double pinv_tol) {
  require_finite(a, "least_norm_solve");
  require_finite(b, "least_norm_solve");
  if (a.rows() != b.size()) {
    throw ValidationError("least_norm_solve: dimension mismatch");
  }
  const Vector x = pseudoinverse(a, pinv_tol) * b;
  const double residual = (a * x - b).norm();
  if (residual > tol * std::max(1.0, b.norm())) {
    throw InconsistentSystemError("least_norm_solve: inconsistent system (residual " +
                                  std::to_string(residual) + ")");
  }
  return x;
}

Matrix null_space(const Matrix& a, double tol) {
  require_finite(a, "null_space");
  const Eigen::Index cols = a.cols();
  if (a.rows() == 0) return Matrix::Identity(cols, cols);
  const auto svd = full_svd(a);
  const Vector& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? tol * s(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && s(i) > 0.0) ++rank;
  }
  return svd.matrixV().rightCols(cols - rank);
}

Matrix inverse(const Matrix& a, double rcond_min) {
  require_finite(a, "inverse");
  if (a.rows() != a.cols()) throw ValidationError("inverse: matrix not square");
  Eigen::PartialPivLU<Matrix> lu(a);
  if (!(lu.rcond() > rcond_min)) {
    throw SingularMatrixError("inverse: matrix is numerically singular");
  }
  return lu.inverse();
}

LpSolution maximize_lp(const Vector& c, const Matrix& a, const Vector& b) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index vars = a.cols();
  if (c.size() != vars || b.size() != rows) {
    throw ValidationError("maximize_lp: dimension mismatch");
  }
  if ((b.array() < 0.0).any()) {
    throw ValidationError("maximize_lp: origin must be feasible (b >= 0)");
  }

  // Free variables split as x = x+ - x-; one slack per row.
  const Eigen::Index cols = 2 * vars + rows;
  Matrix tab = Matrix::Zero(rows + 1, cols + 1);
  tab.block(0, 0, rows, vars) = a;
  tab.block(0, vars, rows, vars) = -a;
  tab.block(0, 2 * vars, rows, rows).setIdentity();
  tab.block(0, cols, rows, 1) = b;
  tab.block(rows, 0, 1, vars) = -c.transpose();
  tab.block(rows, vars, 1, vars) = c.transpose();

  std::vector<Eigen::Index> basis(rows);
  for (Eigen::Index i = 0; i < rows; ++i) basis[i] = 2 * vars + i;

  constexpr double kEps = 1e-12;
  const int max_iter = 50 * static_cast<int>(cols + rows + 1);
  for (int iter = 0; iter < max_iter; ++iter) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (tab(rows, j) < -kEps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;

    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (tab(i, enter) > kEps) {
        const double ratio = tab(i, cols) / tab(i, enter);
        if (ratio < best - kEps || (std::abs(ratio - best) <= kEps && leave >= 0 &&
                                    basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) {
      LpSolution unbounded;
      unbounded.status = LpSolution::Status::kUnbounded;
      unbounded.objective = std::numeric_limits<double>::infinity();
      return unbounded;
    }

    tab.row(leave) /= tab(leave, enter);
    for (Eigen::Index i = 0; i <= rows; ++i) {
      if (i != leave && tab(i, enter) != 0.0) {
        tab.row(i) -= tab(i, enter) * tab.row(leave);
      }
    }
    basis[leave] = enter;
  }

  Vector split = Vector::Zero(cols);
  for (Eigen::Index i = 0; i < rows; ++i) split(basis[i]) = tab(i, cols);
  LpSolution out;
  out.x = split.head(vars) - split.segment(vars, vars);
  out.objective = c.dot(out.x);
  return out;
}

}  // namespace flownet
