#include "houdini/dual_update.hpp"

#include "houdini/asm_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace houdini {

namespace {

constexpr double kRoundoff = 1e-13;
constexpr double kFeasibilityTol = 1e-7;

void check_context(const ProblemInstance& inst, const DualContext& ctx) {
  const IndexSets& s = ctx.index_sets;
  if (ctx.x_k.size() != inst.n() || ctx.y_start.size() != inst.m())
    throw LinalgError("dual_update: x_k or y_start has the wrong length");
  if (s.primal_support.universe() != inst.n() || s.primal_active.universe() != inst.m() ||
      s.residual_signs.size() != inst.m())
    throw LinalgError("dual_update: index sets do not match the instance");
  if (ctx.warm_direction && ctx.warm_direction->size() != inst.m())
    throw LinalgError("dual_update: warm direction has the wrong length");
}

Vec restrict_to(const Vec& v, const IndexSet& set) {
  Vec out = Vec::Zero(v.size());
  for (Index i : set) out(i) = v(i);
  return out;
}

}  // namespace

DualContext make_dual_context(const ProblemInstance& inst, const Vec& x_k, double delta,
                              const Vec& y_start, const SetTolerances& tol) {
  DualContext ctx;
  ctx.x_k = x_k;
  ctx.index_sets = classify(inst, x_k, y_start, delta, tol);
  ctx.y_start = restrict_to(y_start, ctx.index_sets.primal_active);
  return ctx;
}

bool DualMultipliers::optimal(double tol) const {
  return (mu.size() == 0 || mu.minCoeff() >= -tol) && (nu.size() == 0 || nu.minCoeff() >= -tol);
}

SolveReport dual_direction(const ProblemInstance& inst, const DualContext& ctx,
                           const IndexSet& dual_support, const IndexSet& dual_active,
                           double consistency_tol) {
  const Index rows = dual_active.size();
  DenseMatrix mat(rows + 1, dual_support.size());
  mat.topRows(rows) = submatrix(inst.a, dual_support, dual_active).transpose();
  mat.row(rows) = subvector(ctx.index_sets.residual_signs, dual_support).transpose();
  Vec rhs = Vec::Zero(rows + 1);
  rhs(rows) = 1.0;
  SolveReport r = solve_consistent(mat, rhs, consistency_tol);
  r.solution = scatter(r.solution, dual_support);
  return r;
}

DualStep dual_step(const ProblemInstance& inst, const DualContext& ctx, const Vec& e,
                   const Vec& psi, const IndexSet& dual_support, const IndexSet& dual_active,
                   const SubsolverOptions& options) {
  const Vec& s = ctx.index_sets.residual_signs;
  const Vec g = inst.a.transpose() * psi;
  const Vec rate = inst.a.transpose() * e;
  const Vec scale = inst.a.cwiseAbs().transpose() * e.cwiseAbs();
  const double e_scale = norm_inf(e);
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<std::pair<Index, double>> col_ratios, row_ratios;
  double alpha = inf;
  for (Index j : dual_active.complement()) {
    double ratio = inf;
    if (rate(j) < -kRoundoff * scale(j))
      ratio = std::max(0.0, 1.0 + g(j)) / -rate(j);
    else if (rate(j) > kRoundoff * scale(j))
      ratio = std::max(0.0, 1.0 - g(j)) / rate(j);
    else
      continue;
    col_ratios.emplace_back(j, ratio);
    alpha = std::min(alpha, ratio);
  }
  for (Index i : dual_support) {
    const double r = s(i) * e(i);
    if (r < -kRoundoff * e_scale) {
      const double ratio = std::max(0.0, s(i) * psi(i)) / -r;
      row_ratios.emplace_back(i, ratio);
      alpha = std::min(alpha, ratio);
    }
  }
  if (!std::isfinite(alpha))
    throw SolverError(SolverErrorKind::kUnboundedStep,
                      "dual update: no blocking constraint along the direction");

  const double cutoff = alpha + options.blocking_rel_tol * std::max(alpha, 1e-12);
  DualStep out;
  out.alpha = alpha;
  out.joining = IndexSet(inst.n());
  out.leaving = IndexSet(inst.m());
  for (auto [j, r] : col_ratios)
    if (r <= cutoff) out.joining.insert(j);
  for (auto [i, r] : row_ratios)
    if (r <= cutoff) out.leaving.insert(i);
  out.psi = psi + alpha * e;
  for (Index i : out.leaving) out.psi(i) = 0.0;
  out.dual_support = dual_support.minus(out.leaving);
  out.dual_active = dual_active.unite(out.joining);
  return out;
}

DualMultipliers dual_multipliers(const ProblemInstance& inst, const DualContext& ctx,
                                 const Vec& psi, const IndexSet& dual_support,
                                 const IndexSet& dual_active, const SubsolverOptions& options) {
  const IndexSets& sets = ctx.index_sets;
  const Vec& s = sets.residual_signs;
  const DenseMatrix mat = submatrix(inst.a, dual_support, dual_active);
  const Vec rhs = -subvector(s, dual_support);
  const SolveReport r = solve_consistent(mat, rhs, std::max(options.consistency_tol, 1e-7));
  if (!r.consistent)
    throw SolverError(SolverErrorKind::kInconsistentSystem,
                      "dual update: multiplier system has residual " +
                          std::to_string(r.residual_norm));
  DualMultipliers out;
  out.d_hat = scatter(r.solution, dual_active);
  out.mu_index = dual_active.minus(sets.primal_support);
  out.nu_index = sets.primal_active.minus(dual_support);
  const Vec g = inst.a.transpose() * psi;
  out.mu = Vec(out.mu_index.size());
  for (Index p = 0; p < out.mu_index.size(); ++p) {
    const Index j = out.mu_index[p];
    out.mu(p) = -sign(g(j)) * out.d_hat(j);
  }
  const Vec ad = inst.a * out.d_hat;
  out.nu = Vec(out.nu_index.size());
  for (Index p = 0; p < out.nu_index.size(); ++p) {
    const Index i = out.nu_index[p];
    out.nu(p) = -s(i) * ad(i) - 1.0;
  }
  return out;
}

DualUpdateResult dual_update(const ProblemInstance& inst, const DualContext& ctx,
                             const SubsolverOptions& options) {
  check_context(inst, ctx);
  const IndexSets& sets = ctx.index_sets;
  const IndexSet& primal_active = sets.primal_active;
  const IndexSet& primal_support = sets.primal_support;
  const Vec& s = sets.residual_signs;

  Vec psi = restrict_to(ctx.y_start, primal_active);
  {
    const Vec g = inst.a.transpose() * psi;
    for (Index j = 0; j < inst.n(); ++j) {
      const bool ok = primal_support.contains(j)
                          ? std::abs(-g(j) - sets.primal_signs(j)) <= kFeasibilityTol
                          : std::abs(g(j)) <= 1.0 + kFeasibilityTol;
      if (!ok)
        throw SolverError(SolverErrorKind::kPrecondition,
                          "dual update: start violates column " + std::to_string(j));
    }
    for (Index i : primal_active) {
      if (s(i) * psi(i) < -kFeasibilityTol)
        throw SolverError(SolverErrorKind::kPrecondition,
                          "dual update: start has the wrong sign in row " + std::to_string(i));
    }
  }

  IndexSet dual_support(inst.m());
  for (Index i : primal_active) {
    if (std::abs(psi(i)) > options.zero_tol)
      dual_support.insert(i);
    else
      psi(i) = 0.0;
  }
  IndexSet dual_active = primal_support;
  {
    const Vec g = inst.a.transpose() * psi;
    for (Index j = 0; j < inst.n(); ++j)
      if (std::abs(std::abs(g(j)) - 1.0) <= options.active_tol) dual_active.insert(j);
  }

  DualUpdateResult result;
  std::optional<Vec> pending;
  if (ctx.warm_direction) {
    const Vec& w = *ctx.warm_direction;
    bool usable = true;
    for (Index i = 0; i < inst.m(); ++i)
      if (!primal_active.contains(i) && std::abs(w(i)) > options.warm_nonzero_tol) usable = false;
    IndexSet support = dual_support;
    IndexSet active = dual_active;
    if (usable) {
      for (Index i : primal_active.minus(dual_support))
        if (std::abs(w(i)) > options.warm_nonzero_tol) support.insert(i);
      const Vec rate = inst.a.transpose() * w;
      for (Index j : dual_active.minus(primal_support))
        if (std::abs(rate(j)) > options.warm_nonzero_tol) active.erase(j);
      const Vec we = restrict_to(w, support);
      const double tol = options.consistency_tol * 10.0;
      const double slope = s.dot(we);
      const Vec active_rate = inst.a.transpose() * we;
      usable = std::abs(slope - 1.0) <= tol && (w - we).lpNorm<Eigen::Infinity>() <= tol;
      for (Index j : active)
        if (std::abs(active_rate(j)) > tol * (1.0 + inst.a.col(j).cwiseAbs().sum())) usable = false;
      if (usable) {
        dual_support = support;
        dual_active = active;
        pending = we;
        result.warm_started = true;
      }
    }
  }

  const Index cap = options.max_iterations > 0
                        ? options.max_iterations
                        : 50 * (primal_active.size() + inst.n()) + 50;
  RelaxationLedger ledger(inst.n(), inst.m());
  SubsolverCounters& counters = result.counters;
  while (true) {
    if (counters.iterations >= cap)
      throw SolverError(SolverErrorKind::kIterationLimit,
                        "dual update exceeded " + std::to_string(cap) + " iterations");
    ++counters.iterations;

    SolveReport dir;
    if (pending) {
      dir.consistent = true;
      dir.solution = std::move(*pending);
      pending.reset();
    } else {
      ++counters.direction_solves;
      dir = dual_direction(inst, ctx, dual_support, dual_active, options.consistency_tol);
    }

    if (dir.consistent) {
      const Vec& e = dir.solution;
      DualStep step = dual_step(inst, ctx, e, psi, dual_support, dual_active, options);
      if (step.alpha == 0.0) ++counters.zero_steps;
      psi = std::move(step.psi);
      dual_support = step.dual_support;
      dual_active = step.dual_active;
      const Vec rate = inst.a.transpose() * e;
      const Vec scale = inst.a.cwiseAbs().transpose() * e.cwiseAbs();
      const double e_scale = norm_inf(e);
      ledger.after_step(
          step.alpha, StepResult{step.alpha, step.joining, step.leaving}, dual_active,
          dual_support,
          [&](Index j) { return std::abs(rate(j)) <= options.zero_tol * (1e-3 + scale(j)); },
          [&](Index i) { return std::abs(e(i)) <= options.zero_tol * (1e-3 + e_scale); });
      continue;
    }

    ++counters.multiplier_rounds;
    DualMultipliers mult = dual_multipliers(inst, ctx, psi, dual_support, dual_active, options);
    if (mult.optimal(options.multiplier_tol)) {
      result.y = psi;
      result.d_hat = std::move(mult.d_hat);
      result.dual_support = dual_support;
      result.dual_active = dual_active;
      result.objective = -s.dot(psi);
      return result;
    }
    Index mu_pos = -1, nu_pos = -1;
    double mu_min = std::numeric_limits<double>::infinity();
    double nu_min = mu_min;
    for (Index p = 0; p < mult.mu.size(); ++p)
      if (mult.mu(p) < mu_min) mu_min = mult.mu(p), mu_pos = p;
    for (Index p = 0; p < mult.nu.size(); ++p)
      if (mult.nu(p) < nu_min) nu_min = mult.nu(p), nu_pos = p;
    if (mu_min < nu_min) {
      const Index j = mult.mu_index[mu_pos];
      dual_active.erase(j);
      ledger.removed_active.insert(j);
    } else {
      const Index i = mult.nu_index[nu_pos];
      dual_support.insert(i);
      ledger.added_support.insert(i);
    }
  }
}

}  // namespace houdini
