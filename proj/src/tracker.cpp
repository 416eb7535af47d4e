#include "deckrec/tracker.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "deckrec/numcore.hpp"

namespace deckrec {

namespace {

Complex ipow(Complex z, int k) {
  Complex r(1.0, 0.0);
  while (k > 0) {
    if (k & 1) r *= z;
    k >>= 1;
    if (k > 0) z *= z;
  }
  return r;
}

double inf_norm(const VectorXc& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

CompiledSystem::CompiledSystem(const System& system) : n_(system.n()), m_(system.m()) {
  for (const auto& eq : system.equations()) {
    std::vector<CompiledTerm> terms;
    for (const auto& t : eq.terms()) {
      CompiledTerm ct{t.coefficient, {}};
      for (std::size_t v = 0; v < t.exponent.size(); ++v)
        if (t.exponent[v] > 0) ct.factors.push_back({static_cast<int>(v), t.exponent[v]});
      terms.push_back(std::move(ct));
    }
    equations_.push_back(std::move(terms));
  }
}

void CompiledSystem::evaluate(const VectorXc& x, const VectorXc& p, VectorXc& F) const {
  F.setZero(static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i) {
    Complex sum(0.0, 0.0);
    for (const auto& t : equations_[i]) {
      Complex v = t.coefficient;
      for (const auto& f : t.factors)
        v *= ipow(static_cast<std::size_t>(f.var) < n_ ? x[f.var] : p[f.var - static_cast<int>(n_)], f.power);
      sum += v;
    }
    F[static_cast<Eigen::Index>(i)] = sum;
  }
}

void CompiledSystem::evaluate(const VectorXc& x, const VectorXc& p, VectorXc& F, MatrixXc& Jx,
                              MatrixXc& Jp) const {
  const auto n = static_cast<Eigen::Index>(n_);
  const auto m = static_cast<Eigen::Index>(m_);
  F.setZero(n);
  Jx.setZero(n, n);
  Jp.setZero(n, m);
  std::vector<Complex> vals;
  std::vector<Complex> prefix;
  for (std::size_t i = 0; i < n_; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    for (const auto& t : equations_[i]) {
      const std::size_t k = t.factors.size();
      vals.resize(k);
      prefix.resize(k + 1);
      prefix[0] = Complex(1.0, 0.0);
      for (std::size_t a = 0; a < k; ++a) {
        const auto& f = t.factors[a];
        const Complex z = static_cast<std::size_t>(f.var) < n_ ? x[f.var] : p[f.var - static_cast<int>(n_)];
        vals[a] = ipow(z, f.power);
        prefix[a + 1] = prefix[a] * vals[a];
      }
      F[row] += t.coefficient * prefix[k];
      Complex suffix(1.0, 0.0);
      for (std::size_t a = k; a-- > 0;) {
        const auto& f = t.factors[a];
        const Complex z = static_cast<std::size_t>(f.var) < n_ ? x[f.var] : p[f.var - static_cast<int>(n_)];
        const Complex d = t.coefficient * static_cast<double>(f.power) * ipow(z, f.power - 1) * prefix[a] * suffix;
        if (static_cast<std::size_t>(f.var) < n_)
          Jx(row, f.var) += d;
        else
          Jp(row, f.var - static_cast<int>(n_)) += d;
        suffix *= vals[a];
      }
    }
  }
}

double CompiledSystem::residual(const VectorXc& x, const VectorXc& p) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    Complex sum(0.0, 0.0);
    double mag = 0.0;
    for (const auto& t : equations_[i]) {
      Complex v = t.coefficient;
      for (const auto& f : t.factors)
        v *= ipow(static_cast<std::size_t>(f.var) < n_ ? x[f.var] : p[f.var - static_cast<int>(n_)], f.power);
      sum += v;
      mag += std::abs(v);
    }
    worst = std::max(worst, std::abs(sum) / std::max(1.0, mag));
  }
  return worst;
}

void TrackerConfig::validate() const {
  if (!(newton_tol > 0 && path_tol > 0 && min_step > 0)) throw Error("tracker tolerances must be positive");
  if (!(min_step <= initial_step && initial_step <= max_step)) throw Error("need min_step <= initial_step <= max_step");
  if (!(initial_step <= 1.0)) throw Error("initial_step must lie in (0, 1]");
  if (!(step_expand > 1.0)) throw Error("step_expand must exceed 1");
  if (!(step_shrink > 0.0 && step_shrink < 1.0)) throw Error("step_shrink must lie in (0, 1)");
  if (max_newton_iters < 1) throw Error("max_newton_iters must be positive");
}

const char* to_string(PathStatus status) {
  switch (status) {
    case PathStatus::success: return "success";
    case PathStatus::diverged: return "diverged";
    case PathStatus::singular: return "singular";
    case PathStatus::step_underflow: return "step_underflow";
  }
  return "unknown";
}

namespace {

class SegmentHomotopy {
 public:
  SegmentHomotopy(const CompiledSystem& sys, const VectorXc& p_from, const VectorXc& p_to, const TrackerConfig& cfg)
      : sys_(sys), p_from_(p_from), dp_(p_to - p_from), use_gamma_(cfg.use_gamma_trick) {
    if (use_gamma_) {
      Rng rng(cfg.gamma_seed);
      gamma_ = rng.unit_complex();
    }
  }

  VectorXc params(double s) const { return p_from_ + tau(s) * dp_; }

  // dx/ds; throws SingularMatrixError.
  VectorXc velocity(double s, const VectorXc& x) {
    const VectorXc p = params(s);
    sys_.evaluate(x, p, F_, Jx_, Jp_);
    const VectorXc rhs = -(Jp_ * (dp_ * dtau(s)));
    return solve_square(Jx_, rhs);
  }

  const CompiledSystem& system() const { return sys_; }

 private:
  Complex tau(double s) const {
    if (!use_gamma_) return {s, 0.0};
    if (s == 1.0) return {1.0, 0.0};
    return gamma_ * s / (1.0 + (gamma_ - 1.0) * s);
  }
  Complex dtau(double s) const {
    if (!use_gamma_) return {1.0, 0.0};
    const Complex den = 1.0 + (gamma_ - 1.0) * s;
    return gamma_ / (den * den);
  }

  const CompiledSystem& sys_;
  VectorXc p_from_;
  VectorXc dp_;
  bool use_gamma_;
  Complex gamma_{1.0, 0.0};
  VectorXc F_;
  MatrixXc Jx_;
  MatrixXc Jp_;
};

constexpr double kPredictorTol = 1e-4;
constexpr double kStepConverged = 1e-11;

// Newton corrector used between steps. Rejects when the first update is
// large relative to |x| or the iteration fails to contract.
bool correct(const CompiledSystem& sys, VectorXc& x, const VectorXc& p, const TrackerConfig& cfg) {
  VectorXc F;
  MatrixXc Jx, Jp;
  double prev = INFINITY;
  for (int k = 0; k < cfg.max_newton_iters; ++k) {
    sys.evaluate(x, p, F, Jx, Jp);
    VectorXc dx;
    try {
      dx = solve_square(Jx, F);
    } catch (const SingularMatrixError&) {
      return false;
    }
    const double scale = 1.0 + inf_norm(x);
    const double norm = inf_norm(dx);
    if (k == 0 && norm > kPredictorTol * scale) return false;
    if (k > 0 && norm > 0.5 * prev && norm > 1e-13 * scale) return false;
    x -= dx;
    if (norm <= kStepConverged * scale) return true;
    if (sys.residual(x, p) <= cfg.newton_tol) return true;
    prev = norm;
  }
  return sys.residual(x, p) <= cfg.newton_tol;
}

PathResult track_segment(const CompiledSystem& sys, const VectorXc& x_start, const VectorXc& p_from,
                         const VectorXc& p_to, const TrackerConfig& cfg) {
  PathResult result;
  if (x_start.size() != static_cast<Eigen::Index>(sys.n()) || p_from.size() != static_cast<Eigen::Index>(sys.m()) ||
      p_to.size() != static_cast<Eigen::Index>(sys.m()))
    throw Error("track_path: dimension mismatch");
  SegmentHomotopy H(sys, p_from, p_to, cfg);
  VectorXc x = x_start;
  if (sys.residual(x, p_from) > 10 * cfg.newton_tol) {
    try {
      x = newton_polish(sys, x, p_from, cfg.newton_tol, cfg.max_polish_iters);
    } catch (const Error&) {
      result.status = PathStatus::singular;
      result.final_residual = sys.residual(x_start, p_from);
      return result;
    }
  }
  if ((p_to - p_from).cwiseAbs().maxCoeff() == 0.0) {
    result.status = PathStatus::success;
    result.endpoint = x;
    result.final_residual = sys.residual(x, p_to);
    return result;
  }

  double s = 0.0;
  double h = std::min(cfg.initial_step, cfg.max_step);
  int streak = 0;
  while (s < 1.0) {
    const double step = std::min(h, 1.0 - s);
    VectorXc k1, k2, k3, k4;
    try {
      k1 = H.velocity(s, x);
    } catch (const SingularMatrixError&) {
      result.status = PathStatus::singular;
      result.endpoint = x;
      result.final_residual = sys.residual(x, H.params(s));
      return result;
    }
    bool accepted = false;
    VectorXc xn;
    try {
      k2 = H.velocity(s + step / 2, x + (step / 2) * k1);
      k3 = H.velocity(s + step / 2, x + (step / 2) * k2);
      k4 = H.velocity(s + step, x + step * k3);
      xn = x + (step / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const double s_next = (s + step >= 1.0 - 1e-15) ? 1.0 : s + step;
      accepted = correct(sys, xn, H.params(s_next), cfg);
    } catch (const SingularMatrixError&) {
      accepted = false;
    }
    ++result.steps_taken;
    if (accepted) {
      x = std::move(xn);
      s = (s + step >= 1.0 - 1e-15) ? 1.0 : s + step;
      if (inf_norm(x) > cfg.divergence_bound) {
        result.status = PathStatus::diverged;
        result.endpoint = x;
        return result;
      }
      if (++streak >= cfg.expand_after) {
        h = std::min(h * cfg.step_expand, cfg.max_step);
        streak = 0;
      }
    } else {
      streak = 0;
      h *= cfg.step_shrink;
      if (h < cfg.min_step) {
        result.status = PathStatus::step_underflow;
        result.endpoint = x;
        result.final_residual = sys.residual(x, H.params(s));
        return result;
      }
    }
  }

  try {
    x = newton_polish(sys, x, p_to, cfg.newton_tol, cfg.max_polish_iters);
  } catch (const NewtonError&) {
  } catch (const SingularMatrixError&) {
    result.status = PathStatus::singular;
    result.endpoint = x;
    result.final_residual = sys.residual(x, p_to);
    return result;
  }
  result.endpoint = x;
  result.final_residual = sys.residual(x, p_to);
  result.status = result.final_residual <= cfg.path_tol ? PathStatus::success : PathStatus::step_underflow;
  return result;
}

}  // namespace

PathResult track_path(const CompiledSystem& system, const VectorXc& x_start, const VectorXc& p_from,
                      const VectorXc& p_to, const TrackerConfig& cfg) {
  return track_segment(system, x_start, p_from, p_to, cfg);
}

PathResult track_path(const System& system, const VectorXc& x_start, const VectorXc& p_from, const VectorXc& p_to,
                      const TrackerConfig& cfg) {
  return track_path(CompiledSystem(system), x_start, p_from, p_to, cfg);
}

PathResult track_two_segment(const CompiledSystem& system, const VectorXc& x_start, const VectorXc& p0,
                             const VectorXc& p1, const VectorXc& p2, const TrackerConfig& cfg) {
  PathResult first = track_segment(system, x_start, p0, p1, cfg);
  if (!first.ok()) return first;
  PathResult second = track_segment(system, first.endpoint, p1, p2, cfg);
  second.steps_taken += first.steps_taken;
  return second;
}

std::vector<PathResult> track_many(const CompiledSystem& system, const std::vector<VectorXc>& starts,
                                   const std::vector<VectorXc>& waypoints, const TrackerConfig& cfg) {
  if (waypoints.size() < 2) throw Error("track_many needs at least two parameter points");
  std::vector<PathResult> out(starts.size());
  parallel_for(starts.size(), cfg.threads, [&](std::size_t i) {
    PathResult r;
    r.status = PathStatus::success;
    r.endpoint = starts[i];
    int steps = 0;
    for (std::size_t w = 0; w + 1 < waypoints.size(); ++w) {
      r = track_segment(system, r.endpoint, waypoints[w], waypoints[w + 1], cfg);
      steps += r.steps_taken;
      if (!r.ok()) break;
    }
    r.steps_taken = steps;
    out[i] = std::move(r);
  });
  return out;
}

double min_pairwise_distance(const std::vector<VectorXc>& points) {
  double best = INFINITY;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      best = std::min(best, inf_norm(points[i] - points[j]));
  return best;
}

FiberSample track_fiber(const CompiledSystem& system, const FiberSample& fiber, const VectorXc& p_to,
                        const TrackerConfig& cfg, double distinct_tol) {
  if (min_pairwise_distance(fiber.solutions) <= distinct_tol)
    throw FiberTrackError("start fiber has coincident solutions");
  const auto results = track_many(system, fiber.solutions, {fiber.params, p_to}, cfg);
  FiberSample out{p_to, {}};
  out.solutions.reserve(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].ok())
      throw FiberTrackError("path " + std::to_string(i) + " failed: " + to_string(results[i].status));
    out.solutions.push_back(results[i].endpoint);
  }
  if (min_pairwise_distance(out.solutions) <= distinct_tol) throw FiberTrackError("tracked endpoints collide");
  return out;
}

FiberSample track_fiber(const System& system, const FiberSample& fiber, const VectorXc& p_to,
                        const TrackerConfig& cfg, double distinct_tol) {
  return track_fiber(CompiledSystem(system), fiber, p_to, cfg, distinct_tol);
}

VectorXc newton_polish(const CompiledSystem& system, const VectorXc& x0, const VectorXc& p, double tol,
                       int max_iters) {
  VectorXc x = x0;
  VectorXc F;
  MatrixXc Jx, Jp;
  for (int k = 0; k < max_iters; ++k) {
    if (system.residual(x, p) <= tol) return x;
    system.evaluate(x, p, F, Jx, Jp);
    const VectorXc dx = solve_square(Jx, F);
    x -= dx;
    if (!x.allFinite()) throw NewtonError("Newton iteration produced non-finite values");
  }
  if (system.residual(x, p) <= tol) return x;
  throw NewtonError("Newton iteration did not converge");
}

VectorXc newton_polish(const System& system, const VectorXc& x, const VectorXc& p, double tol, int max_iters) {
  return newton_polish(CompiledSystem(system), x, p, tol, max_iters);
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace deckrec
