#pragma once

// Monodromy solving: grow a fiber by tracking loops in parameter space and
// collect the permutations those loops induce.

#include <optional>
#include <string>
#include <vector>

#include "deckrec/permgrp.hpp"
#include "deckrec/tracker.hpp"

namespace deckrec {

struct SeedPair {
  VectorXc x;
  VectorXc p;
};

/// Seed oracle for systems affine in the parameters: fixes x (random when
/// not given) and projects a random parameter point onto the affine space of
/// solutions in p. Retries up to `attempts` times with fresh random data.
SeedPair seed_from_linear_params(const System& system, const std::optional<VectorXc>& x_star, Rng& rng,
                                 int attempts = 10);

/// Whether every term has parameter degree <= 1.
bool is_linear_in_parameters(const System& system);

struct MonodromyConfig {
  TrackerConfig tracker;
  std::optional<std::size_t> expected_degree;
  int stall_limit = 10;
  int permutation_stall_limit = 5;
  int max_loops = 400;
  double identity_tol = 1e-6;
  double distinct_ratio = 100.0;
  /// Upper bound on the group enumeration driving the stopping rule.
  std::uint64_t order_cap = 100000;
  std::uint64_t rng_seed = 0;
};

/// Intermediate parameter points of a triangle loop p* -> q1 -> q2 -> p*.
struct MonodromyLoop {
  VectorXc q1;
  VectorXc q2;
};

struct MonodromyResult {
  FiberSample base;
  std::vector<Permutation> permutations;
  /// loops[i] induced permutations[i]
  std::vector<MonodromyLoop> loops;
  int loop_count = 0;
  int failed_paths = 0;
  /// False when expected_degree was given but never reached.
  bool complete = true;

  std::size_t degree() const { return base.solutions.size(); }
  PermutationGroup group() const { return PermutationGroup(degree(), permutations); }
};

class MonodromyError : public Error {
 public:
  using Error::Error;
};

MonodromyResult run_monodromy(const System& system, const SeedPair& seed, const MonodromyConfig& cfg);

/// Index of the unique point of `fiber` within tol of `point` whose second
/// nearest neighbour is at least ratio times farther; nullopt otherwise.
std::optional<std::size_t> match_point(const std::vector<VectorXc>& fiber, const VectorXc& point, double tol,
                                       double ratio);

/// Matches endpoints[i] -> fiber index. Returns nullopt unless the matching
/// is a bijection under match_point.
std::optional<Permutation> match_fibers(const std::vector<VectorXc>& fiber, const std::vector<VectorXc>& endpoints,
                                        double tol, double ratio);

/// Re-tracks a loop over the whole base fiber and returns the permutation.
std::optional<Permutation> replay_loop(const System& system, const FiberSample& base, const MonodromyLoop& loop,
                                       const MonodromyConfig& cfg);

/// Random complex normal parameter point of length m.
VectorXc random_parameters(std::size_t m, Rng& rng);

/// For `count` random targets, tracks the base solution with label 0 and its
/// deck images sigma(0); output solutions[0] is x and solutions[j] is the
/// image under deck_perms[j-1].
std::vector<FiberSample> sample_orbit(const System& system, const MonodromyResult& result,
                                      const std::vector<Permutation>& deck_perms, std::size_t count,
                                      const MonodromyConfig& cfg, Rng& rng);

/// r = max(1, ceil(2t / d)).
std::size_t batch_count(std::size_t t, std::size_t d);

/// Tracks batch_count(t, d) full fibers to random parameters.
std::vector<FiberSample> batch_fibers(const System& system, const MonodromyResult& result, std::size_t t,
                                      const MonodromyConfig& cfg, Rng& rng);

}  // namespace deckrec
