#include "houdini/homotopy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace houdini {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kTargetReached: return "target-reached";
    case Termination::kFailure: return "failure";
  }
  return "unknown";
}

PairReport optimal_pair_report(const ProblemInstance& inst, const Vec& x, const Vec& y,
                               double delta, double support_tol) {
  if (x.size() != inst.n() || y.size() != inst.m())
    throw LinalgError("optimal pair: x or y has the wrong length");
  PairReport rep;
  const Vec g = inst.a.transpose() * y;
  for (Index j = 0; j < inst.n(); ++j) {
    const double v = std::abs(x(j)) > support_tol ? std::abs(-g(j) - sign(x(j)))
                                                  : std::max(0.0, std::abs(g(j)) - 1.0);
    rep.sign_x = std::max(rep.sign_x, v);
  }
  const Vec r = inst.a * x - inst.b;
  for (Index i = 0; i < inst.m(); ++i) {
    const double v = std::abs(y(i)) > support_tol ? std::abs(r(i) - delta * sign(y(i)))
                                                  : std::max(0.0, std::abs(r(i)) - delta);
    rep.sign_y = std::max(rep.sign_y, v);
  }
  rep.primal_value = norm_1(x);
  rep.dual_value = -inst.b.dot(y) - delta * norm_1(y);
  rep.gap = std::abs(rep.primal_value - rep.dual_value);
  return rep;
}

bool check_optimal_pair(const ProblemInstance& inst, const Vec& x, const Vec& y, double delta,
                        double tol) {
  const PairReport rep = optimal_pair_report(inst, x, y, delta);
  return rep.sign_x <= tol && rep.sign_y <= tol;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct IterationOutcome {
  DualUpdateResult dual;
  PrimalUpdateResult primal;
};

SubsolverOptions tightened(SubsolverOptions o) {
  o.zero_tol *= 0.01;
  o.active_tol *= 0.01;
  o.blocking_rel_tol *= 0.01;
  o.multiplier_tol *= 0.01;
  return o;
}

}  // namespace

SolutionPath solve_path(const ProblemInstance& inst, const HomotopyOptions& options) {
  inst.validate();
  const Index m = inst.m();
  const Index n = inst.n();
  SolutionPath path;
  path.delta_target = inst.delta;
  const double delta0 = norm_inf(inst.b);

  auto record = [&](Index k, double delta, const Vec& x, const Vec& y, double t) {
    PathBreakpoint bp;
    bp.k = k;
    bp.delta = delta;
    bp.x = x;
    bp.y = y;
    bp.t_step = t;
    bp.sets = classify(inst, x, y, delta, options.sets);
    path.breakpoints.push_back(std::move(bp));
  };

  if (inst.delta >= delta0) {
    record(0, inst.delta, Vec::Zero(n), Vec::Zero(m), 0.0);
    path.terminated = Termination::kTargetReached;
    return path;
  }

  const Index cap = options.max_iterations > 0 ? options.max_iterations : 20 * (m + n);
  Vec x = Vec::Zero(n);
  Vec y = Vec::Zero(m);
  double delta_k = delta0;
  IndexSet primal_support(n);
  IndexSet primal_active(m);
  Vec residual_signs = Vec::Zero(m);
  for (Index i = 0; i < m; ++i)
    if (std::abs(inst.b(i)) >= delta0 - 1e-12 * delta0) {
      primal_active.insert(i);
      residual_signs(i) = sign(-inst.b(i));
    }
  std::optional<Vec> warm_e;

  auto run_iteration = [&](Index k, const SubsolverOptions& sub, bool allow_warm) {
    IterationOutcome out;
    DualContext dctx;
    dctx.x_k = x;
    dctx.index_sets.primal_support = primal_support;
    dctx.index_sets.primal_active = primal_active;
    dctx.index_sets.primal_signs = sign(x);
    dctx.index_sets.residual_signs = residual_signs;
    dctx.y_start = k == 0 ? Vec::Zero(m) : y;
    if (allow_warm && options.warm_start) dctx.warm_direction = warm_e;
    auto start = Clock::now();
    out.dual = dual_update(inst, dctx, sub);
    path.stats.timing.dual_seconds += seconds_since(start);

    PrimalContext pctx;
    pctx.y_next = out.dual.y;
    pctx.delta_k = delta_k;
    pctx.delta_target = inst.delta;
    pctx.x_start = x;
    pctx.index_sets = dctx.index_sets;
    pctx.index_sets.dual_active = out.dual.dual_active;
    pctx.index_sets.dual_support = out.dual.dual_support;
    pctx.index_sets.dual_signs = sign(out.dual.y);
    if (allow_warm && options.warm_start) pctx.warm_direction = out.dual.d_hat;
    start = Clock::now();
    out.primal = primal_update(inst, pctx, sub);
    path.stats.timing.primal_seconds += seconds_since(start);
    return out;
  };

  try {
    for (Index k = 0;; ++k) {
      if (k >= cap)
        throw SolverError(SolverErrorKind::kIterationLimit,
                          "homotopy exceeded " + std::to_string(cap) + " breakpoints");
      IterationOutcome it = run_iteration(k, options.subsolver, true);
      if (!it.primal.reached_target && it.primal.t <= options.min_step) {
        ++path.stats.degeneracy_retries;
        it = run_iteration(k, tightened(options.subsolver), false);
        if (!it.primal.reached_target && it.primal.t <= options.min_step)
          throw SolverError(SolverErrorKind::kDegenerateStep,
                            "step t = " + std::to_string(it.primal.t) + " at delta = " +
                                std::to_string(delta_k) + " after a tightened retry");
      }

      PathStatistics& st = path.stats;
      st.dual_iterations += it.dual.counters.iterations;
      st.primal_iterations += it.primal.counters.iterations;
      st.direction_solves += it.dual.counters.direction_solves + it.primal.counters.direction_solves;
      st.multiplier_rounds +=
          it.dual.counters.multiplier_rounds + it.primal.counters.multiplier_rounds;
      st.warm_starts_used += Index(it.dual.warm_started) + Index(it.primal.warm_started);
      st.ambiguous_columns += it.primal.ambiguous_columns;

      if (k == 0) record(0, delta0, x, it.dual.y, 0.0);

      const auto refresh_start = Clock::now();
      const double t = it.primal.reached_target ? delta_k - inst.delta : it.primal.t;
      const double delta_next = it.primal.reached_target ? inst.delta : delta_k - t;
      x = it.primal.x;
      for (Index j = 0; j < n; ++j)
        if (std::abs(x(j)) <= options.subsolver.zero_tol) x(j) = 0.0;
      y = it.dual.y;
      primal_support = primal_support_of(x, options.subsolver.zero_tol);
      primal_active = primal_active_of(inst, x, delta_next, options.sets.active)
                          .unite(it.dual.dual_support);
      const Vec r = inst.a * x - inst.b;
      residual_signs = Vec::Zero(m);
      for (Index i : primal_active)
        residual_signs(i) = it.dual.dual_support.contains(i) ? sign(y(i)) : sign(r(i));
      warm_e = it.primal.e_hat;
      delta_k = delta_next;
      record(k + 1, delta_k, x, y, t);
      st.timing.refresh_seconds += seconds_since(refresh_start);

      if (options.trace) {
        const PathBreakpoint& bp = path.breakpoints.back();
        options.trace({k + 1, delta_k, t, bp.sets.primal_support.size(),
                       bp.sets.primal_active.size(), bp.sets.dual_active.size(),
                       bp.sets.dual_support.size(), it.dual.counters.iterations,
                       it.primal.counters.iterations, it.dual.warm_started,
                       it.primal.warm_started});
      }
      if (it.primal.reached_target) {
        path.terminated = Termination::kTargetReached;
        return path;
      }
    }
  } catch (const SolverError& e) {
    path.terminated = Termination::kFailure;
    path.failure_kind = e.kind();
    path.message = e.what();
  } catch (const LinalgError& e) {
    path.terminated = Termination::kFailure;
    path.message = e.what();
  }
  if (path.breakpoints.empty()) record(0, delta0, Vec::Zero(n), Vec::Zero(m), 0.0);
  return path;
}

std::pair<Vec, Vec> eval_path(const SolutionPath& path, double delta) {
  const auto& bps = path.breakpoints;
  if (bps.empty()) throw std::out_of_range("eval_path: empty path");
  const double hi = bps.front().delta;
  const double lo = bps.back().delta;
  const double slack = 1e-12 * (1.0 + hi);
  if (!(delta <= hi + slack && delta >= lo - slack))
    throw std::out_of_range("eval_path: delta " + std::to_string(delta) + " outside [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
  for (std::size_t k = 0; k < bps.size(); ++k)
    if (delta == bps[k].delta) return {bps[k].x, bps[k].y};
  if (delta >= hi) return {bps.front().x, bps.front().y};
  if (delta <= lo) return {bps.back().x, bps.back().y};
  for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
    const PathBreakpoint& a = bps[k];
    const PathBreakpoint& b = bps[k + 1];
    if (delta < a.delta && delta > b.delta) {
      const double theta = (a.delta - delta) / (a.delta - b.delta);
      return {a.x + theta * (b.x - a.x), b.y};
    }
  }
  throw std::out_of_range("eval_path: breakpoints are not decreasing");
}

}  // namespace houdini
