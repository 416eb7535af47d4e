#pragma once

// Recovery of deck transformations as rational functions from sampled pairs
// (x, Psi(x)): Vandermonde assembly, nullspace analysis, representative
// selection, and the dense and multigraded drivers.

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "deckrec/expr.hpp"
#include "deckrec/monodromy.hpp"
#include "deckrec/numcore.hpp"
#include "deckrec/scaling.hpp"

namespace deckrec {

/// A point (x, p) and the j-th coordinate of its image.
struct SamplePair {
  VectorXc point;
  Complex image;
};

/// Row i is [m(pt_i) | -x'_i * m(pt_i)], numerator columns first.
MatrixXc build_vandermonde(const std::vector<SamplePair>& samples, const std::vector<ExponentVector>& numer,
                           const std::vector<ExponentVector>& denom);

struct Representative {
  VectorXc a;  // numerator coefficients
  VectorXc b;  // denominator coefficients
  std::size_t nonzeros = 0;
  std::size_t row = 0;
};

/// Rows of rrefN with both halves nonzero after truncation, sparsest first
/// (ties in row order).
std::vector<Representative> ranked_representatives(const MatrixXc& rrefN, std::size_t split, double truncate_tol = 1e-5);

/// The first of ranked_representatives, if any.
std::optional<Representative> get_representative(const MatrixXc& rrefN, std::size_t split, double truncate_tol = 1e-5);

/// Numerator coefficients of a combination of rows whose denominator part is
/// (1, 0, ..., 0); the free part of the solution family is used greedily to
/// zero numerator coefficients.
std::optional<VectorXc> constant_denominator_representative(const MatrixXc& rrefN, std::size_t split,
                                                            double truncate_tol = 1e-5, double solve_tol = 1e-8);

/// Nearest p/q with |p|, |q| <= bound within tol, else nullopt.
std::optional<Rational> snap_rational(double v, int bound = 20, double tol = 1e-8);

struct InterpConfig {
  double rank_tol = 1e-8;
  double pivot_tol = 1e-8;
  double truncate_tol = 1e-5;
  double validation_tol = 1e-6;
  double extra_fraction = 0.1;
  std::size_t min_extra = 8;
  int snap_bound = 20;
  double snap_tol = 1e-8;
  /// Candidate rows tried per nullspace before giving up.
  std::size_t max_candidates = 8;
  /// Track whole fibers instead of deck orbits.
  bool batch_fibers = false;
};

/// Formula for one coordinate plus the bookkeeping of how it was found.
struct CoordinateFormula {
  RatFun formula;
  std::optional<ExactRatFun> exact;  // present when every coefficient snapped
  int degree = 0;
  std::size_t vandermonde_size = 0;
  std::size_t nullspace_dim = 0;
  double validation_error = 0.0;
  bool constant_denominator = false;
};

struct DeckMap {
  Permutation permutation;
  std::vector<std::optional<CoordinateFormula>> coords;
  int degree_bound_used = 0;

  std::size_t missing_count() const;
  bool complete() const { return missing_count() == 0; }
  /// Evaluates coordinate j at (x, p); requires coords[j].
  Complex evaluate(std::size_t j, const VectorXc& point) const;
  std::string formula_string(std::size_t j, const std::vector<std::string>& names) const;
};

struct InterpStats {
  std::size_t samples_drawn = 0;
  std::size_t largest_vandermonde = 0;  // rows == cols
  std::size_t largest_class = 0;
  std::size_t class_count = 0;
  std::size_t subproblems = 0;
  /// (deck index, coordinate, degree) -> nullspace dimension of the dense
  /// problem; graded runs record the class that produced the formula.
  std::map<std::tuple<std::size_t, std::size_t, int>, std::size_t> nullspace_dims;
};

struct InterpResult {
  std::vector<DeckMap> maps;
  InterpStats stats;
  std::vector<std::string> warnings;
};

/// Algorithm over all monomials of degree <= D for D = 1..D*.
InterpResult interpolate_dense(const System& system, const MonodromyResult& mono,
                               const std::vector<Permutation>& deck_perms, int degree_bound, bool parameter_dependent,
                               const MonodromyConfig& mcfg, const InterpConfig& cfg, Rng& rng);

/// Same loop but over multidegree classes of the commuting scaling lattice.
InterpResult interpolate_graded(const System& system, const MonodromyResult& mono,
                                const std::vector<Permutation>& deck_perms, const ScalingLattice& lattice,
                                int degree_bound, bool parameter_dependent, const MonodromyConfig& mcfg,
                                const InterpConfig& cfg, Rng& rng);

/// Partition of the monomials by multidegree, keys in ascending order.
std::map<Multidegree, std::vector<ExponentVector>> monomial_classes(const std::vector<ExponentVector>& monomials,
                                                                    const Grading& grading);

struct CheckResult {
  bool passed = true;
  bool applicable = true;
  double worst = 0.0;
};

struct VerifyReport {
  CheckResult pairing;
  CheckResult fiber_preservation;
  CheckResult quasi_homogeneity;
  /// Worst pairing error per coordinate (NaN for missing ones).
  std::vector<double> coordinate_worst;
  std::size_t trials = 0;
  bool passed() const { return pairing.passed && fiber_preservation.passed && quasi_homogeneity.passed; }
};

struct VerifyConfig {
  std::size_t trials = 10;
  double pairing_tol = 1e-6;
  double residual_tol = 1e-6;
  double homogeneity_tol = 1e-6;
};

/// Checks a deck map against freshly tracked fibers. `lattice` may be null.
VerifyReport verify_deck(const System& system, const DeckMap& deck, const MonodromyResult& mono,
                         const ScalingLattice* lattice, const MonodromyConfig& mcfg, const VerifyConfig& vcfg,
                         Rng& rng);

/// Fiber permutation realised by the present coordinates on the base fiber.
std::optional<Permutation> infer_permutation(const DeckMap& deck, const FiberSample& fiber, double tol = 1e-6);

/// Deck map with identity formulas x_j for every coordinate.
DeckMap identity_deck_map(const System& system);

}  // namespace deckrec
