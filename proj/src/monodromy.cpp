#include "deckrec/monodromy.hpp"

#include <cmath>
#include <tuple>

#include "deckrec/numcore.hpp"

namespace deckrec {

namespace {

double inf_norm(const VectorXc& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

int parameter_degree(const ExponentVector& e, std::size_t n) {
  int s = 0;
  for (std::size_t i = n; i < e.size(); ++i) s += e[i];
  return s;
}

}  // namespace

bool is_linear_in_parameters(const System& system) {
  for (const auto& eq : system.equations())
    for (const auto& t : eq.terms())
      if (parameter_degree(t.exponent, system.n()) > 1) return false;
  return true;
}

SeedPair seed_from_linear_params(const System& system, const std::optional<VectorXc>& x_star, Rng& rng, int attempts) {
  if (!is_linear_in_parameters(system)) throw Error("seed oracle needs equations affine in the parameters");
  const std::size_t n = system.n();
  const std::size_t m = system.m();
  const CompiledSystem cs(system);
  if (x_star && x_star->size() != static_cast<Eigen::Index>(n)) throw Error("seed x has wrong length");
  std::string last = "no attempt made";
  for (int attempt = 0; attempt < attempts; ++attempt) {
    const VectorXc x = x_star ? *x_star : rng.complex_normal_vector(static_cast<Eigen::Index>(n));
    MatrixXc A = MatrixXc::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    VectorXc b = VectorXc::Zero(static_cast<Eigen::Index>(n));
    VectorXc point = VectorXc::Zero(static_cast<Eigen::Index>(n + m));
    point.head(static_cast<Eigen::Index>(n)) = x;
    point.tail(static_cast<Eigen::Index>(m)).setOnes();
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& t : system.equations()[i].terms()) {
        ExponentVector ex = t.exponent;
        std::optional<std::size_t> param;
        for (std::size_t k = n; k < n + m; ++k)
          if (ex[k] > 0) {
            param = k - n;
            ex[k] = 0;
          }
        const Complex v = t.coefficient * evaluate_monomial(ex, point);
        if (param)
          A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*param)) += v;
        else
          b[static_cast<Eigen::Index>(i)] += v;
      }
    VectorXc p = random_parameters(m, rng);
    if (m > 0) {
      const VectorXc r = A * p + b;
      Eigen::CompleteOrthogonalDecomposition<MatrixXc> cod(A);
      p -= cod.solve(r);
    }
    VectorXc xs = x;
    const double res = cs.residual(xs, p);
    if (!(res <= 1e-10)) {
      last = "seed residual " + std::to_string(res) + " exceeds 1e-10";
      if (x_star) break;
      continue;
    }
    VectorXc F;
    MatrixXc Jx, Jp;
    cs.evaluate(xs, p, F, Jx, Jp);
    if (!(condition_estimate(Jx) < 1e10)) {
      last = "Jacobian is rank deficient at the seed";
      if (x_star) break;
      continue;
    }
    return {xs, p};
  }
  throw Error("seed oracle failed: " + last);
}

VectorXc random_parameters(std::size_t m, Rng& rng) { return rng.complex_normal_vector(static_cast<Eigen::Index>(m)); }

std::optional<std::size_t> match_point(const std::vector<VectorXc>& fiber, const VectorXc& point, double tol,
                                       double ratio) {
  double best = INFINITY;
  double second = INFINITY;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < fiber.size(); ++i) {
    const double dist = inf_norm(fiber[i] - point);
    if (dist < best) {
      second = best;
      best = dist;
      idx = i;
    } else if (dist < second) {
      second = dist;
    }
  }
  if (!(best < tol)) return std::nullopt;
  if (second < ratio * best) return std::nullopt;
  return idx;
}

std::optional<Permutation> match_fibers(const std::vector<VectorXc>& fiber, const std::vector<VectorXc>& endpoints,
                                        double tol, double ratio) {
  if (fiber.size() != endpoints.size()) return std::nullopt;
  std::vector<int> images(fiber.size(), -1);
  std::vector<char> used(fiber.size(), 0);
  for (std::size_t i = 0; i < endpoints.size(); ++i) {
    const auto j = match_point(fiber, endpoints[i], tol, ratio);
    if (!j || used[*j]) return std::nullopt;
    used[*j] = 1;
    images[i] = static_cast<int>(*j);
  }
  return Permutation(std::move(images));
}

namespace {

struct GroupSignature {
  std::optional<std::uint64_t> order;
  std::size_t orbits = 0;
  std::size_t centralizer = 0;
  std::size_t block_systems = 0;

  bool operator==(const GroupSignature& o) const {
    return std::tie(order, orbits, centralizer, block_systems) ==
           std::tie(o.order, o.orbits, o.centralizer, o.block_systems);
  }
};

GroupSignature signature(const PermutationGroup& G, std::uint64_t cap) {
  GroupSignature s;
  s.order = group_order_capped(G, cap);
  std::vector<char> seen(G.degree, 0);
  for (std::size_t v = 0; v < G.degree; ++v) {
    if (seen[v]) continue;
    ++s.orbits;
    for (int w : orbit(G, static_cast<int>(v))) seen[static_cast<std::size_t>(w)] = 1;
  }
  if (!s.order && s.orbits == 1) {
    s.centralizer = centralizer_in_symmetric(G).size();
    s.block_systems = minimal_block_systems(G).size();
  }
  return s;
}

}  // namespace

MonodromyResult run_monodromy(const System& system, const SeedPair& seed, const MonodromyConfig& cfg) {
  cfg.tracker.validate();
  const CompiledSystem cs(system);
  Rng rng(cfg.rng_seed);
  MonodromyResult result;
  result.base.params = seed.p;
  std::vector<VectorXc>& known = result.base.solutions;
  try {
    known.push_back(newton_polish(cs, seed.x, seed.p, cfg.tracker.newton_tol));
  } catch (const Error& e) {
    throw MonodromyError(std::string("seed does not refine to a solution: ") + e.what());
  }

  // Loop vertices are spread on the scale of the base parameters.
  const double spread = 2.0 * std::max(1.0, seed.p.size() ? seed.p.norm() / std::sqrt(double(seed.p.size())) : 1.0);
  // Few parameters leave few branch points for a triangle to separate.
  const int stall_limit = system.m() <= 2 ? 4 * cfg.stall_limit : cfg.stall_limit;
  int stall = 0;
  int uninformative = 0;
  int bad_loops = 0;
  std::optional<GroupSignature> current;

  for (int loop = 0; loop < cfg.max_loops; ++loop) {
    const double scale = spread * std::exp(2.0 * rng.uniform() - 0.5);
    MonodromyLoop L{scale * random_parameters(system.m(), rng), scale * random_parameters(system.m(), rng)};
    const auto paths = track_many(cs, known, {seed.p, L.q1, L.q2, seed.p}, cfg.tracker);
    ++result.loop_count;

    std::size_t failures = 0;
    std::vector<VectorXc> endpoints;
    std::vector<VectorXc> fresh;
    for (const auto& r : paths) {
      if (!r.ok()) {
        ++failures;
        continue;
      }
      endpoints.push_back(r.endpoint);
      if (match_point(known, r.endpoint, cfg.identity_tol, cfg.distinct_ratio)) continue;
      double nearest = INFINITY;
      for (const auto& k : known) nearest = std::min(nearest, inf_norm(k - r.endpoint));
      if (nearest < cfg.identity_tol) continue;  // ambiguous, not new
      bool dup = false;
      for (const auto& f : fresh)
        if (inf_norm(f - r.endpoint) < cfg.identity_tol) dup = true;
      if (!dup) fresh.push_back(r.endpoint);
    }
    result.failed_paths += static_cast<int>(failures);
    if (2 * failures > paths.size()) {
      if (++bad_loops >= 5) throw MonodromyError("more than half of the paths failed in 5 consecutive loops");
    } else {
      bad_loops = 0;
    }

    if (!fresh.empty()) {
      for (auto& f : fresh) {
        try {
          known.push_back(newton_polish(cs, f, seed.p, cfg.tracker.newton_tol));
        } catch (const Error&) {
        }
      }
      result.permutations.clear();
      result.loops.clear();
      current.reset();
      stall = 0;
      uninformative = 0;
      continue;
    }
    ++stall;

    const bool reached = cfg.expected_degree && known.size() >= *cfg.expected_degree;
    const bool discovery_done = reached || stall >= stall_limit;

    bool informative = false;
    if (failures == 0) {
      if (auto perm = match_fibers(known, endpoints, cfg.identity_tol, cfg.distinct_ratio); perm && !perm->is_identity()) {
        std::vector<Permutation> trial = result.permutations;
        trial.push_back(*perm);
        const std::uint64_t cap =
            std::max<std::uint64_t>(1000, std::min<std::uint64_t>(cfg.order_cap, 20000000 / known.size()));
        const GroupSignature sig = signature(PermutationGroup(known.size(), trial), cap);
        if (!current || !(sig == *current)) {
          informative = true;
          current = sig;
          result.permutations.push_back(std::move(*perm));
          result.loops.push_back(L);
        }
      }
    }
    if (informative)
      uninformative = 0;
    else if (discovery_done)
      ++uninformative;

    if (discovery_done && uninformative >= cfg.permutation_stall_limit) break;
  }

  if (known.size() < 2) throw MonodromyError("monodromy stalled with fewer than 2 solutions");
  if (cfg.expected_degree && known.size() != *cfg.expected_degree) result.complete = false;
  return result;
}

std::optional<Permutation> replay_loop(const System& system, const FiberSample& base, const MonodromyLoop& loop,
                                       const MonodromyConfig& cfg) {
  const CompiledSystem cs(system);
  const auto paths = track_many(cs, base.solutions, {base.params, loop.q1, loop.q2, base.params}, cfg.tracker);
  std::vector<VectorXc> endpoints;
  for (const auto& r : paths) {
    if (!r.ok()) return std::nullopt;
    endpoints.push_back(r.endpoint);
  }
  return match_fibers(base.solutions, endpoints, cfg.identity_tol, cfg.distinct_ratio);
}

std::vector<FiberSample> sample_orbit(const System& system, const MonodromyResult& result,
                                      const std::vector<Permutation>& deck_perms, std::size_t count,
                                      const MonodromyConfig& cfg, Rng& rng) {
  const CompiledSystem cs(system);
  std::vector<VectorXc> starts{result.base.solutions.at(0)};
  for (const auto& s : deck_perms) starts.push_back(result.base.solutions.at(static_cast<std::size_t>(s(0))));
  std::vector<FiberSample> out;
  out.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    bool done = false;
    for (int attempt = 0; attempt < 4 && !done; ++attempt) {
      const VectorXc target = random_parameters(system.m(), rng);
      const auto paths = track_many(cs, starts, {result.base.params, target}, cfg.tracker);
      FiberSample sample{target, {}};
      bool ok = true;
      for (const auto& r : paths) {
        if (!r.ok()) {
          ok = false;
          break;
        }
        sample.solutions.push_back(r.endpoint);
      }
      if (ok) {
        out.push_back(std::move(sample));
        done = true;
      }
    }
    if (!done) throw FiberTrackError("orbit sampling failed after 3 retries");
  }
  return out;
}

std::size_t batch_count(std::size_t t, std::size_t d) {
  if (d == 0) throw Error("batch_count: empty fiber");
  return std::max<std::size_t>(1, (2 * t + d - 1) / d);
}

std::vector<FiberSample> batch_fibers(const System& system, const MonodromyResult& result, std::size_t t,
                                      const MonodromyConfig& cfg, Rng& rng) {
  const CompiledSystem cs(system);
  const std::size_t r = batch_count(t, result.degree());
  std::vector<FiberSample> out;
  for (std::size_t i = 0; i < r; ++i) {
    bool done = false;
    for (int attempt = 0; attempt < 4 && !done; ++attempt) {
      try {
        out.push_back(track_fiber(cs, result.base, random_parameters(system.m(), rng), cfg.tracker, cfg.identity_tol));
        done = true;
      } catch (const FiberTrackError&) {
      }
    }
    if (!done) throw FiberTrackError("fiber batch sampling failed after 3 retries");
  }
  return out;
}

}  // namespace deckrec
