#include "deckrec/interp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace deckrec {

MatrixXc build_vandermonde(const std::vector<SamplePair>& samples, const std::vector<ExponentVector>& numer,
                           const std::vector<ExponentVector>& denom) {
  const auto tn = static_cast<Eigen::Index>(numer.size());
  const auto td = static_cast<Eigen::Index>(denom.size());
  MatrixXc A(static_cast<Eigen::Index>(samples.size()), tn + td);
  for (std::size_t r = 0; r < samples.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    for (Eigen::Index c = 0; c < tn; ++c)
      A(i, c) = evaluate_monomial(numer[static_cast<std::size_t>(c)], samples[r].point);
    for (Eigen::Index c = 0; c < td; ++c)
      A(i, tn + c) = -samples[r].image * evaluate_monomial(denom[static_cast<std::size_t>(c)], samples[r].point);
  }
  return A;
}

namespace {

std::size_t count_nonzero(const VectorXc& v, double tol) {
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) >= tol) ++k;
  return k;
}

void truncate(VectorXc& v, double tol) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) < tol) v[i] = 0.0;
}

}  // namespace

std::vector<Representative> ranked_representatives(const MatrixXc& rrefN, std::size_t split, double truncate_tol) {
  const auto s = static_cast<Eigen::Index>(split);
  std::vector<Representative> out;
  for (Eigen::Index r = 0; r < rrefN.rows(); ++r) {
    VectorXc row = rrefN.row(r).transpose();
    truncate(row, truncate_tol);
    Representative rep{row.head(s), row.tail(rrefN.cols() - s), 0, static_cast<std::size_t>(r)};
    const std::size_t na = count_nonzero(rep.a, truncate_tol);
    const std::size_t nb = count_nonzero(rep.b, truncate_tol);
    if (na == 0 || nb == 0) continue;
    rep.nonzeros = na + nb;
    out.push_back(std::move(rep));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Representative& x, const Representative& y) { return x.nonzeros < y.nonzeros; });
  return out;
}

std::optional<Representative> get_representative(const MatrixXc& rrefN, std::size_t split, double truncate_tol) {
  auto ranked = ranked_representatives(rrefN, split, truncate_tol);
  if (ranked.empty()) return std::nullopt;
  return ranked.front();
}

std::optional<VectorXc> constant_denominator_representative(const MatrixXc& rrefN, std::size_t split,
                                                            double truncate_tol, double solve_tol) {
  const auto s = static_cast<Eigen::Index>(split);
  const Eigen::Index k = rrefN.rows();
  const Eigen::Index td = rrefN.cols() - s;
  if (k == 0 || td == 0) return std::nullopt;
  const MatrixXc A = rrefN.leftCols(s);
  const MatrixXc B = rrefN.rightCols(td);
  // B^T r = e1
  const MatrixXc Bt = B.transpose();
  VectorXc e1 = VectorXc::Zero(td);
  e1[0] = 1.0;
  Eigen::BDCSVD<MatrixXc> svd(Bt, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  Eigen::Index rank = 0;
  if (sv.size() > 0 && sv[0] > 0)
    while (rank < sv.size() && sv[rank] > solve_tol * sv[0]) ++rank;
  if (rank == 0) return std::nullopt;
  const MatrixXc& U = svd.matrixU();
  const MatrixXc& V = svd.matrixV();
  VectorXc r0 = V.leftCols(rank) * (sv.head(rank).cwiseInverse().asDiagonal() * (U.leftCols(rank).adjoint() * e1));
  if ((Bt * r0 - e1).cwiseAbs().maxCoeff() > 1e-6) return std::nullopt;
  VectorXc a = A.transpose() * r0;
  MatrixXc M = A.transpose() * V.rightCols(k - rank);

  auto nnz = [&](const VectorXc& v) { return count_nonzero(v, truncate_tol); };
  a = a.unaryExpr([&](Complex z) { return std::abs(z) < 1e-14 ? Complex(0.0) : z; });
  std::vector<bool> used(static_cast<std::size_t>(M.cols()), false);
  // Each move spends one free direction on the zeroing that helps most.
  while (true) {
    std::size_t best_nnz = nnz(a);
    Eigen::Index best_l = -1, best_i = -1;
    VectorXc best;
    for (Eigen::Index l = 0; l < M.cols(); ++l) {
      if (used[static_cast<std::size_t>(l)]) continue;
      const double colmax = M.col(l).cwiseAbs().maxCoeff();
      if (colmax < truncate_tol) {
        used[static_cast<std::size_t>(l)] = true;
        continue;
      }
      for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (std::abs(a[i]) < truncate_tol || std::abs(M(i, l)) < 1e-8 * colmax) continue;
        VectorXc trial = a - (a[i] / M(i, l)) * M.col(l);
        trial[i] = 0.0;
        const std::size_t z = nnz(trial);
        if (z < best_nnz) {
          best_nnz = z;
          best_l = l;
          best_i = i;
          best = std::move(trial);
        }
      }
    }
    if (best_l < 0) break;
    a = best;
    for (Eigen::Index l2 = 0; l2 < M.cols(); ++l2) {
      if (l2 == best_l) continue;
      M.col(l2) -= (M(best_i, l2) / M(best_i, best_l)) * M.col(best_l);
      M(best_i, l2) = 0.0;
    }
    used[static_cast<std::size_t>(best_l)] = true;
  }
  truncate(a, truncate_tol);
  if (nnz(a) == 0) return std::nullopt;
  return a;
}

std::optional<Rational> snap_rational(double v, int bound, double tol) {
  if (std::abs(v) < tol) return Rational(0);
  std::optional<Rational> best;
  double best_err = tol;
  for (int q = 1; q <= bound; ++q) {
    const double pr = std::round(v * q);
    if (std::abs(pr) > bound) continue;
    const double err = std::abs(v - pr / q);
    if (err <= best_err) {
      if (!best || err < best_err) {
        best = Rational(static_cast<long long>(pr), q);
        best_err = err;
      }
    }
  }
  return best;
}

std::size_t DeckMap::missing_count() const {
  return static_cast<std::size_t>(std::count_if(coords.begin(), coords.end(), [](const auto& c) { return !c; }));
}

Complex DeckMap::evaluate(std::size_t j, const VectorXc& point) const {
  const auto& c = coords.at(j);
  if (!c) throw Error("coordinate is missing");
  return deckrec::evaluate(c->formula, point);
}

std::string DeckMap::formula_string(std::size_t j, const std::vector<std::string>& names) const {
  const auto& c = coords.at(j);
  if (!c) return "missing";
  if (c->exact) return format_rational(*c->exact, names);
  return format_rational(c->formula, names);
}

std::map<Multidegree, std::vector<ExponentVector>> monomial_classes(const std::vector<ExponentVector>& monomials,
                                                                    const Grading& grading) {
  std::map<Multidegree, std::vector<ExponentVector>> out;
  for (const auto& m : monomials) out[grading(m)].push_back(m);
  return out;
}

namespace {

// Cached sample pairs for every deck permutation, drawn by orbit or fiber
// tracking, plus monomial values at each sample point.
class SamplePool {
 public:
  SamplePool(const System& system, const MonodromyResult& mono, const std::vector<Permutation>& deck,
             const MonodromyConfig& mcfg, const InterpConfig& cfg, Rng& rng)
      : system_(system), mono_(mono), deck_(deck), mcfg_(mcfg), cfg_(cfg), rng_(rng), images_(deck.size()) {}

  void ensure(std::size_t count) {
    while (pair_count() < count) {
      const std::size_t need = count - pair_count();
      if (cfg_.batch_fibers) {
        const std::size_t d = mono_.degree();
        const std::size_t fibers = (need + d - 1) / d;
        for (auto& f : batch_fibers(system_, mono_, (fibers * d + 1) / 2, mcfg_, rng_)) add_fiber(f);
      } else {
        for (auto& s : sample_orbit(system_, mono_, deck_, need, mcfg_, rng_)) add_orbit(s);
      }
    }
  }

  std::size_t pair_count() const { return images_.empty() ? 0 : images_[0].size(); }
  std::size_t fibers_drawn() const { return drawn_; }

  /// Point index and image vector of pair i for deck permutation k.
  const std::pair<std::size_t, VectorXc>& pair(std::size_t k, std::size_t i) const { return images_[k][i]; }
  const VectorXc& point(std::size_t s) const { return points_[s]; }

  /// Monomial values for the current monomial list, computed on demand.
  void set_monomials(const std::vector<ExponentVector>& monomials) {
    monomials_ = monomials;
    parent_.assign(monomials.size(), {-1, -1});
    std::unordered_map<ExponentVector, std::size_t, ExponentVectorHash> index;
    for (std::size_t i = 0; i < monomials.size(); ++i) index.emplace(monomials[i], i);
    for (std::size_t i = 0; i < monomials.size(); ++i) {
      const ExponentVector& e = monomials[i];
      for (std::size_t v = 0; v < e.size(); ++v)
        if (e[v] > 0) {
          ExponentVector q = e;
          --q[v];
          const auto it = index.find(q);
          if (it != index.end()) parent_[i] = {static_cast<long>(it->second), static_cast<long>(v)};
          break;
        }
    }
    values_.clear();
  }

  const std::vector<Complex>& values(std::size_t s) {
    while (values_.size() <= s) values_.emplace_back();
    auto& row = values_[s];
    if (row.size() == monomials_.size()) return row;
    row.resize(monomials_.size());
    const VectorXc& pt = points_[s];
    for (std::size_t i = 0; i < monomials_.size(); ++i) {
      const auto [par, var] = parent_[i];
      if (par >= 0)
        row[i] = row[static_cast<std::size_t>(par)] * pt[var];
      else
        row[i] = evaluate_monomial(monomials_[i], pt);
    }
    return row;
  }

 private:
  void add_orbit(const FiberSample& s) {
    const std::size_t idx = points_.size();
    points_.push_back(system_.join(s.solutions[0], s.params));
    for (std::size_t k = 0; k < deck_.size(); ++k) images_[k].emplace_back(idx, s.solutions[k + 1]);
    ++drawn_;
  }

  void add_fiber(const FiberSample& f) {
    const std::size_t base = points_.size();
    for (const auto& x : f.solutions) points_.push_back(system_.join(x, f.params));
    for (std::size_t k = 0; k < deck_.size(); ++k)
      for (std::size_t i = 0; i < f.solutions.size(); ++i)
        images_[k].emplace_back(base + i, f.solutions[static_cast<std::size_t>(deck_[k](static_cast<int>(i)))]);
    ++drawn_;
  }

  const System& system_;
  const MonodromyResult& mono_;
  const std::vector<Permutation>& deck_;
  const MonodromyConfig& mcfg_;
  const InterpConfig& cfg_;
  Rng& rng_;
  std::vector<VectorXc> points_;
  std::vector<std::vector<std::pair<std::size_t, VectorXc>>> images_;
  std::size_t drawn_ = 0;
  std::vector<ExponentVector> monomials_;
  std::vector<std::pair<long, long>> parent_;
  std::vector<std::vector<Complex>> values_;
};

struct Subproblem {
  std::vector<std::size_t> numer;  // indices into the pool's monomial list
  std::vector<std::size_t> denom;
  std::size_t fit_rows;
  std::size_t holdout_end;
};

RatFun make_rational(const std::vector<ExponentVector>& monos, const Subproblem& sp, const VectorXc& a,
                     const VectorXc& b, std::size_t nvars) {
  std::vector<Term<Complex>> nt, dt;
  for (std::size_t i = 0; i < sp.numer.size(); ++i)
    if (a[static_cast<Eigen::Index>(i)] != 0.0) nt.push_back({a[static_cast<Eigen::Index>(i)], monos[sp.numer[i]]});
  for (std::size_t i = 0; i < sp.denom.size(); ++i)
    if (b[static_cast<Eigen::Index>(i)] != 0.0) dt.push_back({b[static_cast<Eigen::Index>(i)], monos[sp.denom[i]]});
  return RatFun(Poly(nvars, std::move(nt)), Poly(nvars, std::move(dt)));
}

// Worst relative error on the held-out pairs; infinity on a vanishing
// denominator.
double holdout_error(SamplePool& pool, std::size_t k, std::size_t j, const RatFun& f, std::size_t begin,
                     std::size_t end) {
  double worst = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const auto& [s, img] = pool.pair(k, i);
    const VectorXc& pt = pool.point(s);
    const Complex den = evaluate(f.denominator(), pt);
    double scale = 0.0;
    for (const auto& t : f.denominator().terms()) scale += std::abs(t.coefficient * evaluate_monomial(t.exponent, pt));
    if (std::abs(den) <= 1e-12 * scale) return INFINITY;
    const Complex v = evaluate(f.numerator(), pt) / den;
    const Complex target = img[static_cast<Eigen::Index>(j)];
    worst = std::max(worst, std::abs(v - target) / (1.0 + std::abs(target)));
  }
  return worst;
}

// Snaps coefficients after normalising by one of the coefficients; returns
// the first variant that still validates.
std::optional<CoordinateFormula> snap_formula(SamplePool& pool, std::size_t k, std::size_t j, const RatFun& f,
                                              const Subproblem& sp, const InterpConfig& cfg) {
  std::vector<Complex> scales;
  const auto& dt = f.denominator().terms();
  const auto& nt = f.numerator().terms();
  if (!dt.empty()) {
    scales.push_back(dt.front().coefficient);
    auto big = std::max_element(dt.begin(), dt.end(), [](const auto& x, const auto& y) {
      return std::abs(x.coefficient) < std::abs(y.coefficient);
    });
    scales.push_back(big->coefficient);
    scales.push_back(dt.back().coefficient);
  }
  if (!nt.empty()) scales.push_back(nt.front().coefficient);

  auto snap_poly = [&](const Poly& p, Complex scale, bool& all) {
    std::vector<Term<ExactComplex>> exact;
    std::vector<Term<Complex>> snapped;
    for (const auto& t : p.terms()) {
      const Complex c = t.coefficient / scale;
      const auto re = snap_rational(c.real(), cfg.snap_bound, cfg.snap_tol);
      const auto im = snap_rational(c.imag(), cfg.snap_bound, cfg.snap_tol);
      if (re && im) {
        ExactComplex e(*re, *im);
        exact.push_back({e, t.exponent});
        snapped.push_back({CoefficientTraits<ExactComplex>::to_complex(e), t.exponent});
      } else {
        all = false;
        snapped.push_back({c, t.exponent});
      }
    }
    return std::make_pair(Poly(p.nvars(), std::move(snapped)), ExactPoly(p.nvars(), std::move(exact)));
  };

  std::optional<CoordinateFormula> partial;
  for (const Complex& scale : scales) {
    if (std::abs(scale) == 0.0) continue;
    bool all = true;
    auto [num, enums] = snap_poly(f.numerator(), scale, all);
    auto [den, edens] = snap_poly(f.denominator(), scale, all);
    if (den.is_zero() || num.is_zero()) continue;
    const RatFun g(num, den);
    const double err = holdout_error(pool, k, j, g, sp.fit_rows, sp.holdout_end);
    if (err > cfg.validation_tol) continue;
    CoordinateFormula cf;
    cf.formula = g;
    cf.validation_error = err;
    if (all) {
      cf.exact = ExactRatFun(enums, edens);
      return cf;
    }
    if (!partial) partial = std::move(cf);
  }
  return partial;
}

struct Attempt {
  std::optional<CoordinateFormula> formula;
  std::size_t nullspace_dim = 0;
  std::size_t nonzeros = 0;
};

Attempt solve_subproblem(SamplePool& pool, const std::vector<ExponentVector>& monos, std::size_t k, std::size_t j,
                         const Subproblem& sp, std::size_t nvars, const InterpConfig& cfg) {
  Attempt out;
  const auto tn = static_cast<Eigen::Index>(sp.numer.size());
  const auto td = static_cast<Eigen::Index>(sp.denom.size());
  MatrixXc A(static_cast<Eigen::Index>(sp.fit_rows), tn + td);
  for (std::size_t r = 0; r < sp.fit_rows; ++r) {
    const auto& [s, img] = pool.pair(k, r);
    const auto& vals = pool.values(s);
    const Complex x = img[static_cast<Eigen::Index>(j)];
    const auto row = static_cast<Eigen::Index>(r);
    for (Eigen::Index c = 0; c < tn; ++c) A(row, c) = vals[sp.numer[static_cast<std::size_t>(c)]];
    for (Eigen::Index c = 0; c < td; ++c) A(row, tn + c) = -x * vals[sp.denom[static_cast<std::size_t>(c)]];
    const double mx = A.row(row).cwiseAbs().maxCoeff();
    if (mx > 0) A.row(row) /= mx;
  }
  const MatrixXc N = nullspace(A, cfg.rank_tol);
  out.nullspace_dim = static_cast<std::size_t>(N.cols());
  if (N.cols() == 0) return out;
  const MatrixXc R = rref(N.transpose(), cfg.pivot_tol);

  auto accept = [&](const RatFun& f, bool constant_den, std::size_t nnz) -> bool {
    const double err = holdout_error(pool, k, j, f, sp.fit_rows, sp.holdout_end);
    if (!(err <= cfg.validation_tol)) return false;
    std::optional<CoordinateFormula> snapped = snap_formula(pool, k, j, f, sp, cfg);
    CoordinateFormula cf;
    if (snapped) {
      cf = std::move(*snapped);
    } else {
      cf.formula = f;
      cf.validation_error = err;
    }
    cf.constant_denominator = constant_den;
    cf.vandermonde_size = static_cast<std::size_t>(tn + td);
    cf.nullspace_dim = out.nullspace_dim;
    out.formula = std::move(cf);
    out.nonzeros = nnz;
    return true;
  };

  const auto ranked = ranked_representatives(R, static_cast<std::size_t>(tn), cfg.truncate_tol);
  for (std::size_t c = 0; c < ranked.size() && c < cfg.max_candidates; ++c) {
    const RatFun f = make_rational(monos, sp, ranked[c].a, ranked[c].b, nvars);
    if (f.numerator().is_zero() || f.denominator().is_zero()) continue;
    if (accept(f, false, ranked[c].nonzeros)) return out;
  }
  if (!sp.denom.empty() && monos[sp.denom[0]].total_degree() == 0) {
    if (auto a = constant_denominator_representative(R, static_cast<std::size_t>(tn), cfg.truncate_tol)) {
      VectorXc b = VectorXc::Zero(td);
      b[0] = 1.0;
      const RatFun f = make_rational(monos, sp, *a, b, nvars);
      if (!f.numerator().is_zero()) accept(f, true, count_nonzero(*a, cfg.truncate_tol) + 1);
    }
  }
  return out;
}

std::vector<Permutation> nontrivial(const std::vector<Permutation>& deck) {
  std::vector<Permutation> out;
  for (const auto& s : deck)
    if (!s.is_identity()) out.push_back(s);
  return out;
}

std::size_t with_extra(std::size_t rows, const InterpConfig& cfg) {
  const auto extra = static_cast<std::size_t>(std::ceil(cfg.extra_fraction * static_cast<double>(rows)));
  return rows + std::max(extra, cfg.min_extra);
}

InterpResult interpolate(const System& system, const MonodromyResult& mono, const std::vector<Permutation>& deck_in,
                         const Grading* grading, int degree_bound, bool parameter_dependent,
                         const MonodromyConfig& mcfg, const InterpConfig& cfg, Rng& rng) {
  if (degree_bound < 1) throw Error("degree bound must be at least 1");
  const std::vector<Permutation> deck = nontrivial(deck_in);
  const std::size_t n = system.n();
  const std::size_t nvars = system.nvars();
  InterpResult result;
  for (const auto& s : deck) {
    DeckMap dm;
    dm.permutation = s;
    dm.coords.resize(n);
    dm.degree_bound_used = degree_bound;
    result.maps.push_back(std::move(dm));
  }
  if (deck.empty()) return result;
  SamplePool pool(system, mono, deck, mcfg, cfg, rng);

  for (int D = 1; D <= degree_bound; ++D) {
    bool pending = false;
    for (const auto& dm : result.maps)
      if (!dm.complete()) pending = true;
    if (!pending) break;

    const auto monos = monomials_up_to_degree(n, system.m(), D, parameter_dependent);
    pool.set_monomials(monos);
    std::vector<Subproblem> problems;
    if (!grading) {
      std::vector<std::size_t> all(monos.size());
      std::iota(all.begin(), all.end(), 0);
      const std::size_t rows = 2 * monos.size();
      pool.ensure(with_extra(rows, cfg));
      problems.push_back({all, all, rows, with_extra(rows, cfg)});
      result.stats.largest_class = std::max(result.stats.largest_class, monos.size());
    } else {
      std::map<Multidegree, std::vector<std::size_t>> classes;
      for (std::size_t i = 0; i < monos.size(); ++i) classes[(*grading)(monos[i])].push_back(i);
      std::size_t t = 0;
      for (const auto& [key, members] : classes) t = std::max(t, members.size());
      result.stats.largest_class = std::max(result.stats.largest_class, t);
      result.stats.class_count = classes.size();
      pool.ensure(with_extra(2 * t, cfg));
      // The problem list is per coordinate; assemble it inside the loop.
      for (std::size_t k = 0; k < result.maps.size(); ++k)
        for (std::size_t j = 0; j < n; ++j) {
          if (result.maps[k].coords[j]) continue;
          std::optional<Attempt> best;
          for (const auto& [key, members] : classes) {
            const auto dkey = grading->denominator(key, j);
            const auto it = classes.find(dkey);
            if (it == classes.end()) continue;
            const std::size_t rows = members.size() + it->second.size();
            Subproblem sp{members, it->second, rows, pool.pair_count()};
            ++result.stats.subproblems;
            Attempt a = solve_subproblem(pool, monos, k, j, sp, nvars, cfg);
            result.stats.largest_vandermonde = std::max(result.stats.largest_vandermonde, rows);
            if (a.formula && (!best || a.nonzeros < best->nonzeros)) best = std::move(a);
          }
          if (best) {
            best->formula->degree = D;
            result.stats.nullspace_dims[{k, j, D}] = best->nullspace_dim;
            result.maps[k].coords[j] = std::move(best->formula);
          }
        }
      continue;
    }

    for (std::size_t k = 0; k < result.maps.size(); ++k)
      for (std::size_t j = 0; j < n; ++j) {
        if (result.maps[k].coords[j]) continue;
        for (const auto& sp : problems) {
          ++result.stats.subproblems;
          result.stats.largest_vandermonde = std::max(result.stats.largest_vandermonde, sp.fit_rows);
          Attempt a = solve_subproblem(pool, monos, k, j, sp, nvars, cfg);
          result.stats.nullspace_dims[{k, j, D}] = a.nullspace_dim;
          if (a.formula) {
            a.formula->degree = D;
            result.maps[k].coords[j] = std::move(a.formula);
            break;
          }
        }
      }
  }
  result.stats.samples_drawn = pool.fibers_drawn();
  for (const auto& dm : result.maps)
    if (!dm.complete())
      result.warnings.push_back("deck map " + dm.permutation.cycle_string() + ": " + std::to_string(dm.missing_count()) +
                                " coordinate(s) not representable up to degree " + std::to_string(degree_bound) +
                                (parameter_dependent ? " (parameter-dependent)" : " (parameter-independent)"));
  return result;
}

}  // namespace

InterpResult interpolate_dense(const System& system, const MonodromyResult& mono,
                               const std::vector<Permutation>& deck_perms, int degree_bound, bool parameter_dependent,
                               const MonodromyConfig& mcfg, const InterpConfig& cfg, Rng& rng) {
  return interpolate(system, mono, deck_perms, nullptr, degree_bound, parameter_dependent, mcfg, cfg, rng);
}

InterpResult interpolate_graded(const System& system, const MonodromyResult& mono,
                                const std::vector<Permutation>& deck_perms, const ScalingLattice& lattice,
                                int degree_bound, bool parameter_dependent, const MonodromyConfig& mcfg,
                                const InterpConfig& cfg, Rng& rng) {
  const Grading grading(lattice);
  if (grading.width() != system.nvars()) throw Error("lattice width does not match the system");
  return interpolate(system, mono, deck_perms, &grading, degree_bound, parameter_dependent, mcfg, cfg, rng);
}

// ---------------------------------------------------------------------------
// Verification

DeckMap identity_deck_map(const System& system) {
  DeckMap dm;
  dm.permutation = Permutation::identity(0);
  dm.coords.resize(system.n());
  for (std::size_t j = 0; j < system.n(); ++j) {
    CoordinateFormula cf;
    const ExactPoly v = ExactPoly::variable(system.nvars(), j);
    cf.exact = ExactRatFun(v);
    cf.formula = cf.exact->to_complex();
    cf.degree = 1;
    dm.coords[j] = std::move(cf);
  }
  return dm;
}

std::optional<Permutation> infer_permutation(const DeckMap& deck, const FiberSample& fiber, double tol) {
  const std::size_t d = fiber.solutions.size();
  const std::size_t n = deck.coords.size();
  std::vector<int> images(d, -1);
  std::vector<char> used(d, 0);
  for (std::size_t i = 0; i < d; ++i) {
    VectorXc pt(static_cast<Eigen::Index>(n) + fiber.params.size());
    pt << fiber.solutions[i], fiber.params;
    std::vector<std::pair<std::size_t, Complex>> predicted;
    for (std::size_t j = 0; j < n; ++j)
      if (deck.coords[j]) predicted.emplace_back(j, deck.evaluate(j, pt));
    if (predicted.empty()) return std::nullopt;
    int match = -1;
    for (std::size_t c = 0; c < d; ++c) {
      bool ok = true;
      for (const auto& [j, v] : predicted) {
        const Complex y = fiber.solutions[c][static_cast<Eigen::Index>(j)];
        if (std::abs(v - y) > tol * (1.0 + std::abs(y))) {
          ok = false;
          break;
        }
      }
      if (ok) {
        if (match >= 0) return std::nullopt;
        match = static_cast<int>(c);
      }
    }
    if (match < 0 || used[static_cast<std::size_t>(match)]) return std::nullopt;
    used[static_cast<std::size_t>(match)] = 1;
    images[i] = match;
  }
  return Permutation(std::move(images));
}

VerifyReport verify_deck(const System& system, const DeckMap& deck, const MonodromyResult& mono,
                         const ScalingLattice* lattice, const MonodromyConfig& mcfg, const VerifyConfig& vcfg,
                         Rng& rng) {
  VerifyReport rep;
  const CompiledSystem cs(system);
  const std::size_t n = system.n();
  const std::size_t d = mono.degree();
  const Permutation sigma = deck.permutation.degree() == d ? deck.permutation : Permutation::identity(d);
  std::vector<std::vector<long long>> free_rows;
  if (lattice)
    for (std::size_t r = 0; r < lattice->free.rows(); ++r) free_rows.push_back(to_int_row(lattice->free.row(r)));
  rep.quasi_homogeneity.applicable = !free_rows.empty();
  rep.fiber_preservation.applicable = deck.complete();
  rep.coordinate_worst.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    if (!deck.coords[j]) rep.coordinate_worst[j] = NAN;

  for (std::size_t trial = 0; trial < vcfg.trials; ++trial) {
    FiberSample fiber;
    bool ok = false;
    for (int attempt = 0; attempt < 4 && !ok; ++attempt) {
      try {
        fiber = track_fiber(cs, mono.base, random_parameters(system.m(), rng), mcfg.tracker, mcfg.identity_tol);
        ok = true;
      } catch (const FiberTrackError&) {
      }
    }
    if (!ok) throw FiberTrackError("verification could not track a fresh fiber");
    ++rep.trials;
    for (std::size_t i = 0; i < d; ++i) {
      const VectorXc pt = system.join(fiber.solutions[i], fiber.params);
      const VectorXc& target = fiber.solutions[static_cast<std::size_t>(sigma(static_cast<int>(i)))];
      VectorXc image(static_cast<Eigen::Index>(n));
      for (std::size_t j = 0; j < n; ++j) {
        if (!deck.coords[j]) continue;
        const Complex v = deck.evaluate(j, pt);
        image[static_cast<Eigen::Index>(j)] = v;
        const Complex y = target[static_cast<Eigen::Index>(j)];
        double err = std::abs(v - y) / (1.0 + std::abs(y));
        if (!std::isfinite(err)) err = INFINITY;
        rep.pairing.worst = std::max(rep.pairing.worst, err);
        rep.coordinate_worst[j] = std::max(rep.coordinate_worst[j], err);
      }
      if (rep.fiber_preservation.applicable) {
        const double res = cs.residual(image, fiber.params);
        rep.fiber_preservation.worst = std::max(rep.fiber_preservation.worst, std::isfinite(res) ? res : INFINITY);
      }
      if (rep.quasi_homogeneity.applicable && i < 3) {
        for (const auto& u : free_rows) {
          const Complex lambda = rng.unit_complex();
          const VectorXc scaled = apply_scaling(u, lambda, pt);
          for (std::size_t j = 0; j < n; ++j) {
            if (!deck.coords[j]) continue;
            const Complex lhs = deck.evaluate(j, scaled);
            const Complex rhs = int_power(lambda, u[j]) * deck.evaluate(j, pt);
            const double err = std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
            rep.quasi_homogeneity.worst = std::max(rep.quasi_homogeneity.worst, std::isfinite(err) ? err : INFINITY);
          }
        }
      }
    }
  }
  rep.pairing.passed = rep.pairing.worst <= vcfg.pairing_tol;
  rep.fiber_preservation.passed = !rep.fiber_preservation.applicable || rep.fiber_preservation.worst <= vcfg.residual_tol;
  rep.quasi_homogeneity.passed = !rep.quasi_homogeneity.applicable || rep.quasi_homogeneity.worst <= vcfg.homogeneity_tol;
  return rep;
}

}  // namespace deckrec
