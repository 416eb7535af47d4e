#pragma once

// Dense linear algebra over real or complex scalars: square solves,
// numerical rank and nullspace, and tolerance-aware row reduction.

#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "deckrec/types.hpp"

namespace deckrec {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

class SingularMatrixError : public Error {
 public:
  SingularMatrixError(double condition)
      : Error("matrix is numerically singular (condition estimate " + std::to_string(condition) + ")"),
        condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

/// Solves A x = b by LU with partial pivoting. Throws when the reciprocal
/// condition estimate drops below `rcond_min`.
template <typename Derived, typename RhsDerived>
DenseVector<typename Derived::Scalar> solve_square(const Eigen::MatrixBase<Derived>& A,
                                                   const Eigen::MatrixBase<RhsDerived>& b,
                                                   double rcond_min = 1e-14) {
  using Scalar = typename Derived::Scalar;
  if (A.rows() != A.cols()) throw Error("solve_square needs a square matrix");
  if (A.rows() != b.rows()) throw Error("right-hand side has wrong length");
  Eigen::PartialPivLU<DenseMatrix<Scalar>> lu(A);
  const auto diag = lu.matrixLU().diagonal().cwiseAbs();
  const double rc = A.rows() == 0 ? 1.0 : std::min(lu.rcond(), diag.minCoeff() / diag.maxCoeff());
  if (!(rc >= rcond_min)) throw SingularMatrixError(rc > 0 ? 1.0 / rc : INFINITY);
  return lu.solve(b);
}

/// Singular values in decreasing order.
template <typename Derived>
Eigen::VectorXd singular_values(const Eigen::MatrixBase<Derived>& A) {
  using Scalar = typename Derived::Scalar;
  if (A.size() == 0) return Eigen::VectorXd();
  Eigen::BDCSVD<DenseMatrix<Scalar>> svd(A);
  return svd.singularValues();
}

/// Count of singular values above rank_tol * sigma_max.
template <typename Derived>
Eigen::Index numerical_rank(const Eigen::MatrixBase<Derived>& A, double rank_tol = 1e-8) {
  const Eigen::VectorXd s = singular_values(A);
  if (s.size() == 0 || s[0] == 0.0) return 0;
  Eigen::Index r = 0;
  while (r < s.size() && s[r] > rank_tol * s[0]) ++r;
  return r;
}

/// Orthonormal basis (as columns) of the numerical nullspace: right singular
/// directions whose singular value is at most rank_tol * sigma_max, plus all
/// directions beyond the row count.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> nullspace(const Eigen::MatrixBase<Derived>& A, double rank_tol = 1e-8) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index cols = A.cols();
  if (A.rows() == 0) return DenseMatrix<Scalar>::Identity(cols, cols);
  Eigen::BDCSVD<DenseMatrix<Scalar>> svd(A, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  Eigen::Index r = 0;
  if (s.size() > 0 && s[0] > 0.0)
    while (r < s.size() && s[r] > rank_tol * s[0]) ++r;
  return svd.matrixV().rightCols(cols - r);
}

/// Reduced row echelon form by Gauss-Jordan elimination with partial
/// pivoting. Candidate pivots below pivot_tol * max|M| count as zero; pivots
/// are scaled to one and everything below tolerance in a pivot column is
/// cleared.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> rref(const Eigen::MatrixBase<Derived>& M, double pivot_tol = 1e-8) {
  using Scalar = typename Derived::Scalar;
  DenseMatrix<Scalar> R = M;
  const double scale = R.size() == 0 ? 0.0 : R.cwiseAbs().maxCoeff();
  if (scale == 0.0) return DenseMatrix<Scalar>::Zero(R.rows(), R.cols());
  const double tol = pivot_tol * scale;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < R.cols() && row < R.rows(); ++col) {
    Eigen::Index best;
    const double mag = R.col(col).segment(row, R.rows() - row).cwiseAbs().maxCoeff(&best);
    if (mag <= tol) {
      R.col(col).segment(row, R.rows() - row).setZero();
      continue;
    }
    best += row;
    if (best != row) R.row(best).swap(R.row(row));
    R.row(row) /= R(row, col);
    R(row, col) = Scalar(1);
    for (Eigen::Index i = 0; i < R.rows(); ++i) {
      if (i == row || R(i, col) == Scalar(0)) continue;
      R.row(i) -= R(i, col) * R.row(row);
      R(i, col) = Scalar(0);
    }
    ++row;
  }
  for (Eigen::Index i = row; i < R.rows(); ++i) R.row(i).setZero();
  return R;
}

/// Largest absolute entry; zero for an empty matrix.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& A) {
  return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
}

/// Inf-norm condition estimate based on LU.
double condition_estimate(const MatrixXc& A);

}  // namespace deckrec
