#include "deckrec/numcore.hpp"

namespace deckrec {

double condition_estimate(const MatrixXc& A) {
  if (A.rows() != A.cols()) throw Error("condition estimate needs a square matrix");
  if (A.size() == 0) return 1.0;
  Eigen::PartialPivLU<MatrixXc> lu(A);
  const double rc = lu.rcond();
  return rc > 0 ? 1.0 / rc : INFINITY;
}

}  // namespace deckrec
