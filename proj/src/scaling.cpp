#include "deckrec/scaling.hpp"

#include <cmath>
#include <set>

namespace deckrec {

Complex int_power(Complex z, long long k) {
  if (k < 0) return Complex(1.0, 0.0) / int_power(z, -k);
  Complex r(1.0, 0.0);
  while (k > 0) {
    if (k & 1) r *= z;
    k >>= 1;
    if (k > 0) z *= z;
  }
  return r;
}

IntegerMatrix exponent_difference_matrix(const System& system) {
  const std::size_t nm = system.nvars();
  std::size_t cols = 0;
  for (const auto& eq : system.equations()) cols += eq.size() > 0 ? eq.size() - 1 : 0;
  IntegerMatrix A(nm, cols);
  std::size_t c = 0;
  for (const auto& eq : system.equations()) {
    if (eq.size() == 0) throw Error("equation without terms");
    const ExponentVector& first = eq.terms()[0].exponent;
    for (std::size_t k = 1; k < eq.size(); ++k, ++c)
      for (std::size_t v = 0; v < nm; ++v) A(v, c) = eq.terms()[k].exponent[v] - first[v];
  }
  return A;
}

ScalingLattice extract_scaling_lattice(const SnfDecomposition& snf, std::size_t n_plus_m) {
  if (snf.U.rows() != n_plus_m) throw Error("SNF dimension does not match variable count");
  ScalingLattice L;
  std::vector<std::size_t> free_rows;
  std::map<BigInt, std::vector<std::size_t>> torsion_rows;
  for (std::size_t i = 0; i < n_plus_m; ++i) {
    const BigInt d = i < snf.diagonal.size() ? snf.diagonal[i] : BigInt(0);
    if (d == 0)
      free_rows.push_back(i);
    else if (d > 1)
      torsion_rows[d].push_back(i);
  }
  L.free = IntegerMatrix(free_rows.size(), n_plus_m);
  for (std::size_t r = 0; r < free_rows.size(); ++r)
    for (std::size_t j = 0; j < n_plus_m; ++j) L.free(r, j) = snf.U(free_rows[r], j);
  for (const auto& [d, rows] : torsion_rows) {
    TorsionBlock b{d, IntegerMatrix(rows.size(), n_plus_m)};
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t j = 0; j < n_plus_m; ++j) b.rows(r, j) = mod_floor(snf.U(rows[r], j), d);
    L.torsion.push_back(std::move(b));
  }
  return L;
}

ScalingLattice scaling_lattice(const System& system) {
  const IntegerMatrix A = exponent_difference_matrix(system);
  return extract_scaling_lattice(smith_normal_form(A), system.nvars());
}

std::vector<long long> to_int_row(const std::vector<BigInt>& row) {
  std::vector<long long> out;
  out.reserve(row.size());
  for (const auto& v : row) {
    if (v > BigInt(std::numeric_limits<long long>::max()) || v < BigInt(std::numeric_limits<long long>::min()))
      throw Error("scaling weight does not fit in 64 bits");
    out.push_back(v.convert_to<long long>());
  }
  return out;
}

VectorXc apply_scaling(const std::vector<long long>& u, Complex lambda, const VectorXc& point) {
  if (static_cast<Eigen::Index>(u.size()) != point.size()) throw Error("scaling vector has wrong length");
  VectorXc out = point;
  for (std::size_t k = 0; k < u.size(); ++k)
    if (u[k] != 0) out[static_cast<Eigen::Index>(k)] *= int_power(lambda, u[k]);
  return out;
}

Complex primitive_root(long long d) {
  if (d == 2) return {-1.0, 0.0};
  return std::polar(1.0, 2.0 * M_PI / static_cast<double>(d));
}

const char* to_string(CandidateVerdict v) {
  switch (v) {
    case CandidateVerdict::accepted: return "accepted";
    case CandidateVerdict::not_stable: return "not_stable";
    case CandidateVerdict::not_commuting: return "not_commuting";
    case CandidateVerdict::undetermined: return "undetermined";
  }
  return "unknown";
}

namespace {

// Scaling applied to the unknown block or the parameter block only.
VectorXc scale_segment(const std::vector<long long>& u, std::size_t offset, Complex lambda, const VectorXc& v) {
  VectorXc out = v;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const long long e = u[offset + static_cast<std::size_t>(k)];
    if (e != 0) out[k] *= int_power(lambda, e);
  }
  return out;
}

// Modular arithmetic helpers for prime moduli.
long long mod_pow(long long a, long long e, long long m) {
  long long r = 1 % m;
  a %= m;
  while (e > 0) {
    if (e & 1) r = static_cast<long long>((__int128)r * a % m);
    a = static_cast<long long>((__int128)a * a % m);
    e >>= 1;
  }
  return r;
}

bool is_prime(long long d) {
  if (d < 2) return false;
  for (long long q = 2; q * q <= d; ++q)
    if (d % q == 0) return false;
  return true;
}

// Incremental row echelon basis over GF(p).
class ModBasis {
 public:
  explicit ModBasis(long long p) : p_(p) {}
  bool add(std::vector<long long> v) {
    for (const auto& [col, row] : rows_) {
      const long long f = v[col];
      if (f == 0) continue;
      for (std::size_t j = 0; j < v.size(); ++j) v[j] = ((v[j] - f * row[j]) % p_ + p_) % p_;
    }
    std::size_t col = 0;
    while (col < v.size() && v[col] == 0) ++col;
    if (col == v.size()) return false;
    const long long inv = mod_pow(v[col], p_ - 2, p_);
    for (auto& x : v) x = x * inv % p_;
    for (auto& [c2, row] : rows_) {
      const long long f = row[col];
      if (f == 0) continue;
      for (std::size_t j = 0; j < v.size(); ++j) row[j] = ((row[j] - f * v[j]) % p_ + p_) % p_;
    }
    rows_.emplace_back(col, std::move(v));
    return true;
  }

 private:
  long long p_;
  std::vector<std::pair<std::size_t, std::vector<long long>>> rows_;
};

std::vector<std::vector<long long>> enumerate_candidates(const std::vector<std::vector<long long>>& gens, long long d,
                                                         std::size_t cap, bool& truncated) {
  const std::size_t r = gens.size();
  const std::size_t w = r ? gens[0].size() : 0;
  std::set<std::vector<long long>> seen;
  std::vector<std::vector<long long>> out;
  auto push = [&](std::vector<long long> u) {
    bool zero = true;
    for (auto& x : u) {
      x = ((x % d) + d) % d;
      if (x) zero = false;
    }
    if (!zero && seen.insert(u).second) out.push_back(std::move(u));
  };
  double total = std::pow(static_cast<double>(d), static_cast<double>(r));
  if (total <= static_cast<double>(cap)) {
    truncated = false;
    std::vector<long long> c(r, 0);
    for (;;) {
      std::size_t k = 0;
      while (k < r && ++c[k] == d) c[k++] = 0;
      if (k == r) break;
      std::vector<long long> u(w, 0);
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < w; ++j) u[j] += c[i] * gens[i][j];
      push(std::move(u));
    }
    return out;
  }
  truncated = true;
  for (std::size_t i = 0; i < r; ++i) push(gens[i]);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = i + 1; k < r; ++k) {
      std::vector<long long> u(w);
      for (std::size_t j = 0; j < w; ++j) u[j] = gens[i][j] + gens[k][j];
      push(std::move(u));
    }
  return out;
}

}  // namespace

CandidateResult test_discrete_scaling(const CompiledSystem& system, const MonodromyResult& mono,
                                      const std::vector<Permutation>& deck_perms, const FiberSample& at_p1,
                                      const std::vector<long long>& u, long long modulus, const MonodromyConfig& cfg) {
  CandidateResult res{u, modulus, CandidateVerdict::undetermined, std::nullopt};
  const std::size_t n = system.n();
  const Complex lambda = primitive_root(modulus);
  const VectorXc p2 = scale_segment(u, n, lambda, mono.base.params);
  FiberSample ys;
  try {
    ys = track_fiber(system, at_p1, p2, cfg.tracker, cfg.identity_tol);
  } catch (const FiberTrackError&) {
    return res;
  }
  std::vector<VectorXc> scaled;
  scaled.reserve(mono.base.solutions.size());
  for (const auto& x : mono.base.solutions) scaled.push_back(scale_segment(u, 0, lambda, x));
  const auto tau = match_fibers(ys.solutions, scaled, cfg.identity_tol, cfg.distinct_ratio);
  if (!tau) {
    res.verdict = CandidateVerdict::not_stable;
    return res;
  }
  res.fiber_action = tau;
  for (const auto& s : deck_perms)
    if (!commutes(*tau, s)) {
      res.verdict = CandidateVerdict::not_commuting;
      return res;
    }
  res.verdict = CandidateVerdict::accepted;
  return res;
}

DiscreteScalingReport commuting_discrete_scalings(const ScalingLattice& lattice, const System& system,
                                                  const MonodromyResult& mono,
                                                  const std::vector<Permutation>& deck_perms,
                                                  const MonodromyConfig& cfg, Rng& rng,
                                                  const DiscreteScalingConfig& dcfg) {
  const CompiledSystem cs(system);
  DiscreteScalingReport report;
  report.commuting.free = lattice.free;

  struct BlockWork {
    long long modulus;
    std::vector<std::vector<long long>> gens;
    std::vector<CandidateResult> results;
  };
  std::vector<BlockWork> work;
  for (const auto& block : lattice.torsion) {
    if (block.modulus > BigInt(1000000)) {
      report.warnings.push_back("torsion modulus too large to enumerate: " + block.modulus.str());
      continue;
    }
    BlockWork bw{block.modulus.convert_to<long long>(), {}, {}};
    for (std::size_t r = 0; r < block.rows.rows(); ++r) bw.gens.push_back(to_int_row(block.rows.row(r)));
    bool truncated = false;
    for (auto& u : enumerate_candidates(bw.gens, bw.modulus, dcfg.enumeration_cap, truncated))
      bw.results.push_back({std::move(u), bw.modulus, CandidateVerdict::undetermined, std::nullopt});
    if (truncated) {
      report.enumeration_truncated = true;
      report.warnings.push_back("torsion block mod " + std::to_string(bw.modulus) +
                                " exceeds the enumeration cap; only generators and pairwise sums tested");
    }
    work.push_back(std::move(bw));
  }

  for (int attempt = 0; attempt < dcfg.attempts; ++attempt) {
    bool pending = false;
    for (const auto& bw : work)
      for (const auto& c : bw.results)
        if (c.verdict == CandidateVerdict::undetermined) pending = true;
    if (!pending) break;
    const VectorXc p1 = random_parameters(system.m(), rng);
    FiberSample at_p1;
    try {
      at_p1 = track_fiber(cs, mono.base, p1, cfg.tracker, cfg.identity_tol);
    } catch (const FiberTrackError&) {
      continue;
    }
    for (auto& bw : work)
      for (auto& c : bw.results)
        if (c.verdict == CandidateVerdict::undetermined)
          c = test_discrete_scaling(cs, mono, deck_perms, at_p1, c.u, bw.modulus, cfg);
  }

  for (auto& bw : work) {
    std::vector<std::vector<long long>> keep;
    const bool prime = is_prime(bw.modulus);
    ModBasis basis(prime ? bw.modulus : 2);
    for (const auto& c : bw.results) {
      if (c.verdict == CandidateVerdict::undetermined)
        report.warnings.push_back("scaling candidate left undetermined after repeated tracking failures");
      if (c.verdict != CandidateVerdict::accepted) continue;
      if (prime) {
        if (basis.add(c.u)) keep.push_back(c.u);
      } else if (std::find(bw.gens.begin(), bw.gens.end(), c.u) != bw.gens.end()) {
        keep.push_back(c.u);
      }
    }
    if (!prime) report.warnings.push_back("composite modulus " + std::to_string(bw.modulus) +
                                          ": kept passing generator rows without independence reduction");
    if (!keep.empty()) {
      TorsionBlock tb{BigInt(bw.modulus), IntegerMatrix(keep.size(), lattice.width())};
      for (std::size_t r = 0; r < keep.size(); ++r)
        for (std::size_t j = 0; j < lattice.width(); ++j) tb.rows(r, j) = keep[r][j];
      report.commuting.torsion.push_back(std::move(tb));
    }
    for (auto& c : bw.results) report.candidates.push_back(std::move(c));
  }
  return report;
}

Grading::Grading(const ScalingLattice& lattice) : width_(lattice.width()) {
  for (std::size_t r = 0; r < lattice.free.rows(); ++r) free_.push_back(to_int_row(lattice.free.row(r)));
  for (const auto& b : lattice.torsion) {
    moduli_.push_back(b.modulus.convert_to<long long>());
    std::vector<std::vector<long long>> rows;
    for (std::size_t r = 0; r < b.rows.rows(); ++r) rows.push_back(to_int_row(b.rows.row(r)));
    torsion_.push_back(std::move(rows));
  }
}

Multidegree Grading::operator()(const ExponentVector& e) const {
  if (e.size() != width_) throw Error("exponent length does not match lattice width");
  Multidegree md;
  for (const auto& row : free_) {
    long long s = 0;
    for (std::size_t j = 0; j < width_; ++j) s += row[j] * e[j];
    md.free_part.push_back(s);
  }
  for (std::size_t b = 0; b < torsion_.size(); ++b) {
    std::vector<long long> part;
    for (const auto& row : torsion_[b]) {
      long long s = 0;
      for (std::size_t j = 0; j < width_; ++j) s += row[j] * e[j];
      part.push_back(((s % moduli_[b]) + moduli_[b]) % moduli_[b]);
    }
    md.torsion_parts.push_back(std::move(part));
  }
  return md;
}

Multidegree Grading::column(std::size_t j) const {
  if (j >= width_) throw Error("coordinate index out of range");
  return (*this)(ExponentVector::unit(width_, j));
}

Multidegree Grading::zero() const { return (*this)(ExponentVector(width_)); }

Multidegree Grading::add(const Multidegree& a, const Multidegree& b) const {
  Multidegree r = a;
  for (std::size_t i = 0; i < r.free_part.size(); ++i) r.free_part[i] += b.free_part[i];
  for (std::size_t k = 0; k < r.torsion_parts.size(); ++k)
    for (std::size_t i = 0; i < r.torsion_parts[k].size(); ++i)
      r.torsion_parts[k][i] = (r.torsion_parts[k][i] + b.torsion_parts[k][i]) % moduli_[k];
  return r;
}

Multidegree Grading::denominator(const Multidegree& numer, std::size_t j) const {
  const Multidegree col = column(j);
  Multidegree r = numer;
  for (std::size_t i = 0; i < r.free_part.size(); ++i) r.free_part[i] -= col.free_part[i];
  for (std::size_t k = 0; k < r.torsion_parts.size(); ++k)
    for (std::size_t i = 0; i < r.torsion_parts[k].size(); ++i)
      r.torsion_parts[k][i] = ((r.torsion_parts[k][i] - col.torsion_parts[k][i]) % moduli_[k] + moduli_[k]) % moduli_[k];
  return r;
}

Multidegree multidegree(const ExponentVector& e, const ScalingLattice& lattice) { return Grading(lattice)(e); }

Multidegree denominator_multidegree(const Multidegree& numer, const ScalingLattice& lattice, std::size_t j) {
  return Grading(lattice).denominator(numer, j);
}

double quasi_homogeneity_defect(const System& system, const std::vector<long long>& u, Complex lambda,
                                const VectorXc& point) {
  const VectorXc scaled = apply_scaling(u, lambda, point);
  double worst = 0.0;
  for (const auto& eq : system.equations()) {
    long long w = 0;
    const ExponentVector& first = eq.terms().front().exponent;
    for (std::size_t k = 0; k < u.size(); ++k) w += u[k] * first[k];
    const Complex lhs = evaluate(eq, scaled);
    const Complex rhs = int_power(lambda, w) * evaluate(eq, point);
    double mag = 0.0;
    for (const auto& t : eq.terms()) mag += std::abs(t.coefficient * evaluate_monomial(t.exponent, scaled));
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(mag, 1e-300));
  }
  return worst;
}

}  // namespace deckrec
