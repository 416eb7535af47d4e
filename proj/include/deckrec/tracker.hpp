#pragma once

// Parameter-homotopy path tracking with a Runge-Kutta predictor and a
// Newton corrector.

#include <cstdint>
#include <functional>
#include <vector>

#include "deckrec/expr.hpp"
#include "deckrec/types.hpp"

namespace deckrec {

/// Straight-line program for F, dF/dx and dF/dp of a System.
class CompiledSystem {
 public:
  explicit CompiledSystem(const System& system);

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }

  void evaluate(const VectorXc& x, const VectorXc& p, VectorXc& F) const;
  void evaluate(const VectorXc& x, const VectorXc& p, VectorXc& F, MatrixXc& Jx, MatrixXc& Jp) const;

  /// max_i |f_i| / max(1, sum_k |term_ik|): residual relative to the size
  /// of the terms that cancel.
  double residual(const VectorXc& x, const VectorXc& p) const;

 private:
  struct Factor {
    int var;
    int power;
  };
  struct CompiledTerm {
    Complex coefficient;
    std::vector<Factor> factors;
  };

  std::size_t n_;
  std::size_t m_;
  std::vector<std::vector<CompiledTerm>> equations_;
};

struct TrackerConfig {
  double newton_tol = 1e-10;
  int max_newton_iters = 3;
  int max_polish_iters = 12;
  double initial_step = 0.1;
  double min_step = 1e-9;
  double max_step = 0.1;
  double step_expand = 2.0;
  double step_shrink = 0.5;
  int expand_after = 3;
  double path_tol = 1e-8;
  double divergence_bound = 1e8;
  bool use_gamma_trick = false;
  std::uint64_t gamma_seed = 0;
  int threads = 1;

  /// Throws Error when the invariants between the fields are violated.
  void validate() const;
};

enum class PathStatus { success, diverged, singular, step_underflow };

const char* to_string(PathStatus status);

struct PathResult {
  PathStatus status = PathStatus::step_underflow;
  VectorXc endpoint;
  int steps_taken = 0;
  double final_residual = INFINITY;

  bool ok() const { return status == PathStatus::success; }
};

/// One fiber of the branched cover: a parameter point and the ordered
/// solutions above it.
struct FiberSample {
  VectorXc params;
  std::vector<VectorXc> solutions;
};

class FiberTrackError : public Error {
 public:
  using Error::Error;
};

/// Continues x_start from p_from to p_to along the segment homotopy.
PathResult track_path(const CompiledSystem& system, const VectorXc& x_start, const VectorXc& p_from,
                      const VectorXc& p_to, const TrackerConfig& cfg);
PathResult track_path(const System& system, const VectorXc& x_start, const VectorXc& p_from,
                      const VectorXc& p_to, const TrackerConfig& cfg);

/// p0 -> p1 followed by p1 -> p2.
PathResult track_two_segment(const CompiledSystem& system, const VectorXc& x_start, const VectorXc& p0,
                             const VectorXc& p1, const VectorXc& p2, const TrackerConfig& cfg);

/// Tracks each start point along its own polyline of parameter points.
/// Paths run concurrently when cfg.threads > 1; results keep input order.
std::vector<PathResult> track_many(const CompiledSystem& system, const std::vector<VectorXc>& starts,
                                   const std::vector<VectorXc>& waypoints, const TrackerConfig& cfg);

/// Tracks every solution; throws FiberTrackError on any failed path or when
/// two endpoints coincide within `distinct_tol`.
FiberSample track_fiber(const CompiledSystem& system, const FiberSample& fiber, const VectorXc& p_to,
                        const TrackerConfig& cfg, double distinct_tol = 1e-6);
FiberSample track_fiber(const System& system, const FiberSample& fiber, const VectorXc& p_to,
                        const TrackerConfig& cfg, double distinct_tol = 1e-6);

class NewtonError : public Error {
 public:
  using Error::Error;
};

/// Newton's method in x at fixed p until the residual drops below tol.
VectorXc newton_polish(const CompiledSystem& system, const VectorXc& x, const VectorXc& p, double tol,
                       int max_iters = 20);
VectorXc newton_polish(const System& system, const VectorXc& x, const VectorXc& p, double tol,
                       int max_iters = 20);

/// Smallest pairwise distance (inf-norm) between points; infinity for < 2.
double min_pairwise_distance(const std::vector<VectorXc>& points);

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace deckrec
