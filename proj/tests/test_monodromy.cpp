#include <doctest.h>

#include "deckrec/monodromy.hpp"
#include "test_support.hpp"

using namespace deckrec;
using deckrec::testing::load_system;

TEST_CASE("seed oracle produces a solution pair") {
  const System q = load_system("reciprocal");
  Rng rng(3);
  const SeedPair seed = seed_from_linear_params(q, std::nullopt, rng);
  CHECK(CompiledSystem(q).residual(seed.x, seed.p) < 1e-12);

  // More unknowns than parameters: a random x is generically infeasible.
  const System s = load_system("rational_swap");
  REQUIRE(is_linear_in_parameters(s));
  CHECK_THROWS_AS(seed_from_linear_params(s, std::nullopt, rng), Error);
  const Complex a(0.3, 0.1);
  VectorXc x(2);
  x << a, a * a;
  const SeedPair fixed = seed_from_linear_params(s, x, rng);
  CHECK((fixed.x - x).norm() == 0.0);
  CHECK(CompiledSystem(s).residual(fixed.x, fixed.p) < 1e-12);
}

TEST_CASE("seed oracle rejects parameter-nonlinear systems") {
  const System s = parse_system("unknowns x; parameters p; equations x^2 - p^2;");
  CHECK_FALSE(is_linear_in_parameters(s));
  Rng rng(1);
  CHECK_THROWS_AS(seed_from_linear_params(s, std::nullopt, rng), Error);
}

TEST_CASE("monodromy on the reciprocal quadratic") {
  const System s = load_system("reciprocal");
  Rng rng(5);
  MonodromyConfig cfg;
  cfg.rng_seed = 11;
  const MonodromyResult r = run_monodromy(s, seed_from_linear_params(s, std::nullopt, rng), cfg);
  REQUIRE(r.degree() == 2);
  CHECK(r.complete);
  CHECK(r.loops.size() == r.permutations.size());
  const auto& x = r.base.solutions;
  CHECK(std::abs(x[0][0] * x[1][0] - 1.0) < 1e-9);
  bool nontrivial = false;
  for (const auto& p : r.permutations) nontrivial |= !p.is_identity();
  CHECK(nontrivial);

  SUBCASE("loops replay to the same permutations") {
    for (std::size_t i = 0; i < r.loops.size(); ++i) {
      const auto again = replay_loop(s, r.base, r.loops[i], cfg);
      REQUIRE(again);
      CHECK(*again == r.permutations[i]);
    }
  }
}

TEST_CASE("expected degree mismatch marks the result incomplete") {
  const System s = load_system("reciprocal");
  Rng rng(5);
  MonodromyConfig cfg;
  cfg.rng_seed = 2;
  cfg.expected_degree = 3;
  cfg.stall_limit = 3;
  cfg.max_loops = 20;
  const MonodromyResult r = run_monodromy(s, seed_from_linear_params(s, std::nullopt, rng), cfg);
  CHECK(r.degree() == 2);
  CHECK_FALSE(r.complete);
}

TEST_CASE("monodromy is deterministic for a fixed seed") {
  const System s = load_system("sextic");
  Rng a(9), b(9);
  MonodromyConfig cfg;
  cfg.rng_seed = 17;
  const auto r1 = run_monodromy(s, seed_from_linear_params(s, std::nullopt, a), cfg);
  cfg.tracker.threads = 3;
  const auto r2 = run_monodromy(s, seed_from_linear_params(s, std::nullopt, b), cfg);
  REQUIRE(r1.degree() == 6);
  CHECK(r1.permutations == r2.permutations);
  for (std::size_t i = 0; i < 6; ++i) CHECK((r1.base.solutions[i] - r2.base.solutions[i]).norm() == 0.0);
}

TEST_CASE("point matching") {
  std::vector<VectorXc> fiber(3, VectorXc(1));
  fiber[0] << Complex(0, 0);
  fiber[1] << Complex(1, 0);
  fiber[2] << Complex(0, 1);
  VectorXc q(1);
  q << Complex(1e-9, 0);
  CHECK(match_point(fiber, q, 1e-6, 100.0) == 0u);
  q << Complex(0.5, 0);
  CHECK_FALSE(match_point(fiber, q, 1e-6, 100.0));
  std::vector<VectorXc> ends{fiber[2], fiber[0], fiber[1]};
  const auto perm = match_fibers(fiber, ends, 1e-6, 100.0);
  REQUIRE(perm);
  CHECK((*perm)(0) == 2);
  CHECK((*perm)(1) == 0);
  ends[1] = fiber[2];
  CHECK_FALSE(match_fibers(fiber, ends, 1e-6, 100.0));
}

TEST_CASE("batch count") {
  CHECK(batch_count(1, 10) == 1);
  CHECK(batch_count(10, 10) == 2);
  CHECK(batch_count(11, 10) == 3);
  CHECK(batch_count(0, 4) == 1);
}

TEST_CASE("orbit samples are deck images of each other") {
  const System s = load_system("reciprocal");
  Rng rng(4);
  MonodromyConfig cfg;
  cfg.rng_seed = 6;
  const MonodromyResult r = run_monodromy(s, seed_from_linear_params(s, std::nullopt, rng), cfg);
  const auto C = centralizer_in_symmetric(r.group());
  REQUIRE(C.size() == 2);
  const auto samples = sample_orbit(s, r, {C[1]}, 5, cfg, rng);
  REQUIRE(samples.size() == 5);
  CompiledSystem cs(s);
  for (const auto& f : samples) {
    REQUIRE(f.solutions.size() == 2);
    CHECK(std::abs(f.solutions[0][0] * f.solutions[1][0] - 1.0) < 1e-8);
    CHECK(cs.residual(f.solutions[1], f.params) < 1e-10);
  }
}
