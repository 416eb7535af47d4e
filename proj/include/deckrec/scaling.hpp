#pragma once

// Scaling symmetries (x, p) -> lambda^u * (x, p) read off the supports of a
// system, the homotopy test that keeps the discrete ones commuting with the
// deck group, and the multidegree grading they induce on monomials.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "deckrec/expr.hpp"
#include "deckrec/integer_matrix.hpp"
#include "deckrec/monodromy.hpp"

namespace deckrec {

/// Columns alpha_ij - alpha_i1 for every equation, in declaration order.
IntegerMatrix exponent_difference_matrix(const System& system);

struct TorsionBlock {
  BigInt modulus;
  IntegerMatrix rows;  // entries in [0, modulus)
};

struct ScalingLattice {
  IntegerMatrix free;  // r x (n+m)
  std::vector<TorsionBlock> torsion;

  std::size_t free_rank() const { return free.rows(); }
  std::size_t width() const { return free.cols(); }
};

ScalingLattice extract_scaling_lattice(const SnfDecomposition& snf, std::size_t n_plus_m);

/// SNF of the exponent-difference matrix followed by extraction.
ScalingLattice scaling_lattice(const System& system);

/// Componentwise lambda^u on a point of length n+m; entries of u may be
/// negative.
VectorXc apply_scaling(const std::vector<long long>& u, Complex lambda, const VectorXc& point);

/// z^k for any integer k.
Complex int_power(Complex z, long long k);

/// Primitive root used for modulus d: -1 for d = 2, exp(2 pi i / d) otherwise.
Complex primitive_root(long long d);

enum class CandidateVerdict { accepted, not_stable, not_commuting, undetermined };

const char* to_string(CandidateVerdict v);

struct CandidateResult {
  std::vector<long long> u;
  long long modulus = 0;
  CandidateVerdict verdict = CandidateVerdict::undetermined;
  /// Induced permutation of the base fiber when the scaling preserves X.
  std::optional<Permutation> fiber_action;
};

struct DiscreteScalingConfig {
  std::size_t enumeration_cap = 4096;
  int attempts = 3;
};

struct DiscreteScalingReport {
  ScalingLattice commuting;  // same free part; torsion filtered
  std::vector<CandidateResult> candidates;
  bool enumeration_truncated = false;
  std::vector<std::string> warnings;
};

/// Tests a single scaling vector u with root lambda against the base fiber,
/// reusing the fiber already tracked to the intermediate point p1.
CandidateResult test_discrete_scaling(const CompiledSystem& system, const MonodromyResult& mono,
                                      const std::vector<Permutation>& deck_perms, const FiberSample& at_p1,
                                      const std::vector<long long>& u, long long modulus, const MonodromyConfig& cfg);

DiscreteScalingReport commuting_discrete_scalings(const ScalingLattice& lattice, const System& system,
                                                  const MonodromyResult& mono,
                                                  const std::vector<Permutation>& deck_perms,
                                                  const MonodromyConfig& cfg, Rng& rng,
                                                  const DiscreteScalingConfig& dcfg = {});

/// Image of an exponent under all scaling weights.
struct Multidegree {
  std::vector<long long> free_part;
  std::vector<std::vector<long long>> torsion_parts;

  friend bool operator==(const Multidegree&, const Multidegree&) = default;
  friend auto operator<=>(const Multidegree&, const Multidegree&) = default;
};

/// The lattice with entries converted to machine integers for fast grading.
class Grading {
 public:
  Grading() = default;
  explicit Grading(const ScalingLattice& lattice);

  Multidegree operator()(const ExponentVector& e) const;
  /// numer minus column j of each weight matrix.
  Multidegree denominator(const Multidegree& numer, std::size_t j) const;
  /// Weights of variable j (column j).
  Multidegree column(std::size_t j) const;
  Multidegree add(const Multidegree& a, const Multidegree& b) const;
  Multidegree zero() const;

  std::size_t width() const { return width_; }
  const std::vector<std::vector<long long>>& free_rows() const { return free_; }
  const std::vector<long long>& moduli() const { return moduli_; }
  const std::vector<std::vector<std::vector<long long>>>& torsion_rows() const { return torsion_; }

 private:
  std::size_t width_ = 0;
  std::vector<std::vector<long long>> free_;
  std::vector<long long> moduli_;
  std::vector<std::vector<std::vector<long long>>> torsion_;
};

Multidegree multidegree(const ExponentVector& e, const ScalingLattice& lattice);
Multidegree denominator_multidegree(const Multidegree& numer, const ScalingLattice& lattice, std::size_t j);

/// Worst relative deviation of f_i(lambda^u . pt) from lambda^{w_i} f_i(pt)
/// over all equations, with w_i = u . alpha_i1.
double quasi_homogeneity_defect(const System& system, const std::vector<long long>& u, Complex lambda,
                                const VectorXc& point);

std::vector<long long> to_int_row(const std::vector<BigInt>& row);

}  // namespace deckrec
