#include "houdini/primal_update.hpp"

#include "houdini/asm_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace houdini {

namespace {

constexpr double kRoundoff = 1e-13;
constexpr double kFeasibilityTol = 1e-7;
constexpr double kAmbiguousDual = 1e-9;

void check_context(const ProblemInstance& inst, const PrimalContext& ctx) {
  const IndexSets& s = ctx.index_sets;
  if (ctx.y_next.size() != inst.m() || ctx.x_start.size() != inst.n())
    throw LinalgError("primal_update: y_next or x_start has the wrong length");
  if (s.primal_support.universe() != inst.n() || s.primal_active.universe() != inst.m() ||
      s.dual_active.universe() != inst.n() || s.dual_support.universe() != inst.m() ||
      s.residual_signs.size() != inst.m())
    throw LinalgError("primal_update: index sets do not match the instance");
  if (!(ctx.delta_target <= ctx.delta_k) || ctx.delta_target < 0.0)
    throw SolverError(SolverErrorKind::kPrecondition,
                      "primal_update: need 0 <= delta_target <= delta_k");
  if (ctx.warm_direction && ctx.warm_direction->size() != inst.n())
    throw LinalgError("primal_update: warm direction has the wrong length");
}

void check_start(const ProblemInstance& inst, const PrimalContext& ctx) {
  const IndexSets& s = ctx.index_sets;
  const Vec r = inst.a * ctx.x_start - inst.b;
  const Vec g = inst.a.transpose() * ctx.y_next;
  const double tol = kFeasibilityTol * (1.0 + ctx.delta_k);
  for (Index i = 0; i < inst.m(); ++i) {
    const bool ok = s.dual_support.contains(i)
                        ? std::abs(r(i) - ctx.delta_k * sign(ctx.y_next(i))) <= tol
                        : std::abs(r(i)) <= ctx.delta_k + tol;
    if (!ok)
      throw SolverError(SolverErrorKind::kPrecondition,
                        "primal update: start violates row " + std::to_string(i));
  }
  for (Index j = 0; j < inst.n(); ++j) {
    const bool ok = s.dual_active.contains(j) ? g(j) * ctx.x_start(j) <= kFeasibilityTol
                                              : ctx.x_start(j) == 0.0;
    if (!ok)
      throw SolverError(SolverErrorKind::kPrecondition,
                        "primal update: start violates column " + std::to_string(j));
  }
}

}  // namespace

bool PrimalMultipliers::optimal(double tol) const {
  return (mu.size() == 0 || mu.minCoeff() >= -tol) && (nu.size() == 0 || nu.minCoeff() >= -tol);
}

PrimalIterate make_primal_iterate(const PrimalContext& ctx) {
  const IndexSets& s = ctx.index_sets;
  PrimalIterate it;
  it.xi = ctx.x_start;
  it.tau = 0.0;
  it.primal_active = s.primal_active.unite(s.dual_support);
  it.primal_support = s.primal_support.intersect(s.dual_active);
  it.signs = Vec::Zero(ctx.y_next.size());
  for (Index i : it.primal_active)
    it.signs(i) = s.dual_support.contains(i) ? sign(ctx.y_next(i)) : s.residual_signs(i);
  return it;
}

SolveReport primal_direction(const ProblemInstance& inst, const PrimalIterate& it,
                             double consistency_tol) {
  const DenseMatrix mat = submatrix(inst.a, it.primal_active, it.primal_support);
  const Vec rhs = -subvector(it.signs, it.primal_active);
  SolveReport r = solve_consistent(mat, rhs, consistency_tol);
  r.solution = scatter(r.solution, it.primal_support);
  return r;
}

PrimalStep primal_step(const ProblemInstance& inst, const PrimalContext& ctx, const Vec& d,
                       const PrimalIterate& it, const SubsolverOptions& options) {
  const double inf = std::numeric_limits<double>::infinity();
  const double level = ctx.delta_k - it.tau;
  const Vec r = inst.a * it.xi - inst.b;
  const Vec rate = inst.a * d;
  const Vec scale = inst.a.cwiseAbs() * d.cwiseAbs();
  const Vec g = inst.a.transpose() * ctx.y_next;
  const double d_scale = norm_inf(d);

  PrimalStep out;
  struct RowRatio { Index i; double ratio; double side; };
  std::vector<RowRatio> row_ratios;
  std::vector<std::pair<Index, double>> col_ratios;
  double alpha_block = inf;
  for (Index i : it.primal_active.complement()) {
    const double eps = kRoundoff * (1.0 + scale(i));
    RowRatio best{i, inf, 0.0};
    if (rate(i) + 1.0 > eps) {
      const double ratio = std::max(0.0, level - r(i)) / (rate(i) + 1.0);
      if (ratio < best.ratio) best = {i, ratio, 1.0};
    }
    if (1.0 - rate(i) > eps) {
      const double ratio = std::max(0.0, level + r(i)) / (1.0 - rate(i));
      if (ratio < best.ratio) best = {i, ratio, -1.0};
    }
    if (std::isfinite(best.ratio)) {
      row_ratios.push_back(best);
      alpha_block = std::min(alpha_block, best.ratio);
    }
  }
  for (Index j : it.primal_support) {
    if (std::abs(g(j)) < kAmbiguousDual) {
      ++out.ambiguous_columns;
      continue;
    }
    const double sigma = -sign(g(j));
    if (sigma * d(j) < -kRoundoff * d_scale) {
      const double ratio = std::max(0.0, sigma * it.xi(j)) / (-sigma * d(j));
      col_ratios.emplace_back(j, ratio);
      alpha_block = std::min(alpha_block, ratio);
    }
  }

  const double target = std::max(0.0, ctx.delta_k - it.tau - ctx.delta_target);
  const double cutoff = alpha_block + options.blocking_rel_tol * std::max(alpha_block, 1e-12);
  out.next = it;
  out.joining = IndexSet(inst.m());
  out.leaving = IndexSet(inst.n());
  if (target <= cutoff) {
    out.alpha = target;
    out.reached_target = true;
    out.next.xi += target * d;
    out.next.tau = ctx.delta_k - ctx.delta_target;
    return out;
  }
  out.alpha = alpha_block;
  for (const RowRatio& rr : row_ratios)
    if (rr.ratio <= cutoff) {
      out.joining.insert(rr.i);
      out.next.signs(rr.i) = rr.side;
    }
  for (auto [j, ratio] : col_ratios)
    if (ratio <= cutoff) out.leaving.insert(j);
  out.next.xi += alpha_block * d;
  out.next.tau += alpha_block;
  for (Index j : out.leaving) out.next.xi(j) = 0.0;
  out.next.primal_active = it.primal_active.unite(out.joining);
  out.next.primal_support = it.primal_support.minus(out.leaving);
  return out;
}

PrimalMultipliers primal_multipliers(const ProblemInstance& inst, const PrimalContext& ctx,
                                     const PrimalIterate& it, const SubsolverOptions& options) {
  const IndexSets& sets = ctx.index_sets;
  const Index rows = it.primal_support.size();
  DenseMatrix mat(rows + 1, it.primal_active.size());
  mat.topRows(rows) = submatrix(inst.a, it.primal_active, it.primal_support).transpose();
  mat.row(rows) = subvector(it.signs, it.primal_active).transpose();
  Vec rhs = Vec::Zero(rows + 1);
  rhs(rows) = 1.0;
  const SolveReport r = solve_consistent(mat, rhs, std::max(options.consistency_tol, 1e-7));
  if (!r.consistent)
    throw SolverError(SolverErrorKind::kInconsistentSystem,
                      "primal update: multiplier system has residual " +
                          std::to_string(r.residual_norm));
  PrimalMultipliers out;
  out.e_hat = scatter(r.solution, it.primal_active);
  out.mu_index = it.primal_active.minus(sets.dual_support);
  out.nu_index = sets.dual_active.minus(it.primal_support);
  out.mu = Vec(out.mu_index.size());
  for (Index p = 0; p < out.mu_index.size(); ++p) {
    const Index i = out.mu_index[p];
    out.mu(p) = it.signs(i) * out.e_hat(i);
  }
  const Vec g = inst.a.transpose() * ctx.y_next;
  const Vec ae = inst.a.transpose() * out.e_hat;
  out.nu = Vec(out.nu_index.size());
  for (Index p = 0; p < out.nu_index.size(); ++p) {
    const Index j = out.nu_index[p];
    out.nu(p) = -sign(g(j)) * ae(j);
  }
  return out;
}

PrimalUpdateResult primal_update(const ProblemInstance& inst, const PrimalContext& ctx,
                                 const SubsolverOptions& options) {
  check_context(inst, ctx);
  check_start(inst, ctx);
  const IndexSets& sets = ctx.index_sets;
  PrimalIterate it = make_primal_iterate(ctx);
  PrimalUpdateResult result;

  std::optional<Vec> pending;
  if (ctx.warm_direction) {
    const Vec& w = *ctx.warm_direction;
    bool usable = true;
    for (Index j = 0; j < inst.n(); ++j)
      if (!sets.dual_active.contains(j) && std::abs(w(j)) > options.warm_nonzero_tol)
        usable = false;
    if (usable) {
      PrimalIterate trial = it;
      for (Index j : sets.dual_active.minus(it.primal_support))
        if (std::abs(w(j)) > options.warm_nonzero_tol) trial.primal_support.insert(j);
      const Vec aw = inst.a * w;
      for (Index i : it.primal_active.minus(sets.dual_support))
        if (std::abs(aw(i) + it.signs(i)) > options.warm_nonzero_tol)
          trial.primal_active.erase(i);
      Vec dw = Vec::Zero(inst.n());
      for (Index j : trial.primal_support) dw(j) = w(j);
      const Vec adw = inst.a * dw;
      const double tol = options.consistency_tol * 10.0;
      for (Index i : trial.primal_active)
        if (std::abs(adw(i) + trial.signs(i)) > tol * (1.0 + inst.a.row(i).cwiseAbs().sum()))
          usable = false;
      if ((w - dw).lpNorm<Eigen::Infinity>() > tol) usable = false;
      if (usable) {
        it = std::move(trial);
        pending = dw;
        result.warm_started = true;
      }
    }
  }

  const Index cap = options.max_iterations > 0 ? options.max_iterations
                                               : 50 * (inst.m() + inst.n() + 1) + 50;
  RelaxationLedger ledger(inst.m(), inst.n());
  SubsolverCounters& counters = result.counters;
  auto finish = [&](bool reached, std::optional<Vec> e_hat) {
    result.x = it.xi;
    result.t = it.tau;
    result.reached_target = reached;
    result.e_hat = std::move(e_hat);
    result.primal_active = it.primal_active;
    result.primal_support = it.primal_support;
    result.signs = it.signs;
    return result;
  };

  while (true) {
    if (counters.iterations >= cap)
      throw SolverError(SolverErrorKind::kIterationLimit,
                        "primal update exceeded " + std::to_string(cap) + " iterations");
    ++counters.iterations;

    SolveReport dir;
    if (pending) {
      dir.consistent = true;
      dir.solution = std::move(*pending);
      pending.reset();
    } else {
      ++counters.direction_solves;
      dir = primal_direction(inst, it, options.consistency_tol);
    }

    if (dir.consistent) {
      const Vec& d = dir.solution;
      PrimalStep step = primal_step(inst, ctx, d, it, options);
      result.ambiguous_columns += step.ambiguous_columns;
      if (step.reached_target) {
        it = std::move(step.next);
        return finish(true, std::nullopt);
      }
      if (step.alpha == 0.0) ++counters.zero_steps;
      it = std::move(step.next);
      const Vec rate = inst.a * d;
      const Vec scale = inst.a.cwiseAbs() * d.cwiseAbs();
      const double d_scale = norm_inf(d);
      ledger.after_step(
          step.alpha, StepResult{step.alpha, step.joining, step.leaving}, it.primal_active,
          it.primal_support,
          [&](Index i) {
            return std::abs(it.signs(i) * rate(i) + 1.0) <=
                   options.zero_tol * (1.0 + scale(i));
          },
          [&](Index j) { return std::abs(d(j)) <= options.zero_tol * (1e-3 + d_scale); });
      continue;
    }

    ++counters.multiplier_rounds;
    PrimalMultipliers mult = primal_multipliers(inst, ctx, it, options);
    if (mult.optimal(options.multiplier_tol)) return finish(false, std::move(mult.e_hat));
    Index mu_pos = -1, nu_pos = -1;
    double mu_min = std::numeric_limits<double>::infinity();
    double nu_min = mu_min;
    for (Index p = 0; p < mult.mu.size(); ++p)
      if (mult.mu(p) < mu_min) mu_min = mult.mu(p), mu_pos = p;
    for (Index p = 0; p < mult.nu.size(); ++p)
      if (mult.nu(p) < nu_min) nu_min = mult.nu(p), nu_pos = p;
    if (mu_min < nu_min) {
      const Index i = mult.mu_index[mu_pos];
      it.primal_active.erase(i);
      ledger.removed_active.insert(i);
    } else {
      const Index j = mult.nu_index[nu_pos];
      it.primal_support.insert(j);
      ledger.added_support.insert(j);
    }
  }
}

}  // namespace houdini
