#include <doctest.h>

#include "deckrec/numcore.hpp"

using namespace deckrec;

TEST_CASE("nullspace of a rank-deficient matrix") {
  Rng rng(2);
  const MatrixXc B = MatrixXc::NullaryExpr(7, 3, [&] { return rng.complex_normal(); });
  const MatrixXc C = MatrixXc::NullaryExpr(3, 9, [&] { return rng.complex_normal(); });
  const MatrixXc A = B * C;  // rank 3
  CHECK(numerical_rank(A) == 3);
  const MatrixXc N = nullspace(A);
  CHECK(N.cols() == 6);
  CHECK(max_abs(A * N) < 1e-10);
  CHECK(max_abs(N.adjoint() * N - MatrixXc::Identity(6, 6)) < 1e-10);
}

TEST_CASE("nullspace edge cases") {
  CHECK(nullspace(MatrixXc(0, 4)).cols() == 4);
  CHECK(nullspace(MatrixXc::Identity(3, 3)).cols() == 0);
  CHECK(nullspace(MatrixXc::Zero(2, 3)).cols() == 3);
}

TEST_CASE("reduced row echelon form") {
  Eigen::MatrixXd M(3, 4);
  M << 2, 4, 0, 2,
       1, 2, 1, 3,
       3, 6, 1, 5;
  const Eigen::MatrixXd R = rref(M);
  Eigen::MatrixXd expected(3, 4);
  expected << 1, 2, 0, 1,
              0, 0, 1, 2,
              0, 0, 0, 0;
  CHECK(max_abs(R - expected) < 1e-12);
}

TEST_CASE("rref is idempotent and preserves the row space") {
  Rng rng(9);
  const MatrixXc A = MatrixXc::NullaryExpr(4, 3, [&] { return rng.complex_normal(); }) *
                     MatrixXc::NullaryExpr(3, 6, [&] { return rng.complex_normal(); });
  const MatrixXc R = rref(A);
  CHECK(max_abs(rref(R) - R) < 1e-9);
  CHECK(numerical_rank(R) == 3);
  // Same nullspace.
  CHECK(max_abs(R * nullspace(A)) < 1e-9);
}

TEST_CASE("square solves and singularity") {
  Rng rng(4);
  const MatrixXc A = MatrixXc::NullaryExpr(5, 5, [&] { return rng.complex_normal(); });
  const VectorXc b = rng.complex_normal_vector(5);
  const VectorXc x = solve_square(A, b);
  CHECK((A * x - b).norm() < 1e-10);
  MatrixXc S = A;
  S.row(4).setZero();
  CHECK_THROWS_AS(solve_square(S, b), SingularMatrixError);
  CHECK_THROWS_AS(solve_square(MatrixXc(2, 3), b), Error);
  CHECK(condition_estimate(MatrixXc::Identity(3, 3)) == doctest::Approx(1.0));
}
