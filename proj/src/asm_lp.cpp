#include "houdini/asm_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace houdini {

void StandardLp::validate() const {
  const Index n = c.size();
  if (a_eq.cols() != n || d.cols() != n || sigma.size() != n)
    throw LinalgError("StandardLp: column counts do not match cost length");
  if (a_eq.rows() != b_eq.size()) throw LinalgError("StandardLp: A_eq rows differ from b_eq");
  if (d.rows() != e.size()) throw LinalgError("StandardLp: D rows differ from e");
  require_finite(c, "StandardLp c");
  require_finite(a_eq, "StandardLp A_eq");
  require_finite(b_eq, "StandardLp b_eq");
  require_finite(d, "StandardLp D");
  require_finite(e, "StandardLp e");
  for (Index j = 0; j < n; ++j)
    if (sigma(j) != 1.0 && sigma(j) != -1.0) throw LinalgError("StandardLp: sigma must be ±1");
}

bool Multipliers::optimal(double tol) const {
  const bool mu_ok = mu_active.size() == 0 || mu_active.minCoeff() >= -tol;
  const bool nu_ok = nu_inactive.size() == 0 || nu_inactive.minCoeff() >= -tol;
  return mu_ok && nu_ok;
}

bool is_feasible(const StandardLp& lp, const Vec& x, double tol) {
  if (x.size() != lp.num_vars()) throw LinalgError("is_feasible: dimension mismatch");
  for (Index i = 0; i < lp.num_eq(); ++i)
    if (std::abs(lp.a_eq.row(i).dot(x) - lp.b_eq(i)) > tol * (1.0 + std::abs(lp.b_eq(i))))
      return false;
  for (Index i = 0; i < lp.num_ineq(); ++i)
    if (lp.d.row(i).dot(x) - lp.e(i) < -tol * (1.0 + std::abs(lp.e(i)))) return false;
  for (Index j = 0; j < lp.num_vars(); ++j)
    if (lp.sigma(j) * x(j) < -tol) return false;
  return true;
}

bool kkt_check(const StandardLp& lp, const Vec& x, const Vec& lambda, const Vec& mu,
               const Vec& nu, double tol) {
  if (x.size() != lp.num_vars() || lambda.size() != lp.num_eq() || mu.size() != lp.num_ineq() ||
      nu.size() != lp.num_vars())
    throw LinalgError("kkt_check: dimension mismatch");
  if (!is_feasible(lp, x, tol)) return false;
  const Vec stationarity = lp.a_eq.transpose() * lambda + lp.d.transpose() * mu +
                           lp.sigma.cwiseProduct(nu) - lp.c;
  if (norm_inf(stationarity) > tol * (1.0 + norm_inf(lp.c))) return false;
  for (Index i = 0; i < lp.num_ineq(); ++i) {
    if (mu(i) < -tol) return false;
    if (std::abs(mu(i) * (lp.d.row(i).dot(x) - lp.e(i))) > tol) return false;
  }
  for (Index j = 0; j < lp.num_vars(); ++j) {
    if (nu(j) < -tol) return false;
    if (std::abs(nu(j) * x(j)) > tol) return false;
  }
  return true;
}

AsmState make_state(const StandardLp& lp, const Vec& x, const AsmOptions& options) {
  AsmState s;
  s.x = x;
  s.active = IndexSet(lp.num_ineq());
  s.support = IndexSet(lp.num_vars());
  s.recently_removed = IndexSet(lp.num_ineq());
  s.recently_added = IndexSet(lp.num_vars());
  for (Index i = 0; i < lp.num_ineq(); ++i)
    if (std::abs(lp.d.row(i).dot(x) - lp.e(i)) <= options.active_tol * (1.0 + std::abs(lp.e(i))))
      s.active.insert(i);
  for (Index j = 0; j < lp.num_vars(); ++j)
    if (std::abs(x(j)) > options.support_tol) s.support.insert(j);
  return s;
}

namespace {

DenseMatrix direction_matrix(const StandardLp& lp, const IndexSet& active,
                             const IndexSet& vars) {
  const Index m = lp.num_eq();
  const Index k = active.size();
  DenseMatrix out(m + k, vars.size());
  out.topRows(m) = select_cols(lp.a_eq, vars);
  out.bottomRows(k) = submatrix(lp.d, active, vars);
  return out;
}

}  // namespace

SolveReport find_direction(const StandardLp& lp, const AsmState& state,
                           const AsmOptions& options) {
  const Index m = lp.num_eq();
  const Index k = state.active.size();
  DenseMatrix mat(m + k + 1, state.support.size());
  mat.topRows(m + k) = direction_matrix(lp, state.active, state.support);
  mat.row(m + k) = subvector(lp.c, state.support).transpose();
  Vec rhs = Vec::Zero(m + k + 1);
  rhs(m + k) = -1.0;
  SolveReport r = solve_consistent(mat, rhs, options.consistency_tol);
  r.solution = scatter(r.solution, state.support);
  return r;
}

namespace {

// Reduced system with ξⱼ fixed to σⱼ for a freshly added support variable j,
// rescaled so that cᵀξ = −1.
SolveReport find_direction_fixed(const StandardLp& lp, const AsmState& state, Index j,
                                 const AsmOptions& options) {
  IndexSet rest = state.support;
  rest.erase(j);
  IndexSet only_j(lp.num_vars(), {j});
  const DenseMatrix mat = direction_matrix(lp, state.active, rest);
  const Vec rhs = -lp.sigma(j) * direction_matrix(lp, state.active, only_j).col(0);
  SolveReport r = solve_consistent(mat, rhs, options.consistency_tol);
  Vec xi = scatter(r.solution, rest);
  xi(j) = lp.sigma(j);
  const double slope = lp.c.dot(xi);
  if (!r.consistent || !(slope < -options.zero_tol)) {
    r.consistent = false;
    r.solution = xi;
    return r;
  }
  r.solution = xi / (-slope);
  return r;
}

}  // namespace

StepResult step_size(const StandardLp& lp, const AsmState& state, const Vec& xi,
                     const AsmOptions& options) {
  constexpr double kRoundoff = 1e-13;
  const double inf = std::numeric_limits<double>::infinity();
  const IndexSet inactive = state.active.complement();
  const Vec rates = lp.d * xi;
  const Vec abs_xi = xi.cwiseAbs();
  const double xi_scale = norm_inf(xi);

  std::vector<std::pair<Index, double>> row_ratios;
  std::vector<std::pair<Index, double>> var_ratios;
  double alpha = inf;
  for (Index i : inactive) {
    const double scale = lp.d.row(i).cwiseAbs().dot(abs_xi);
    if (rates(i) < -kRoundoff * scale) {
      const double slack = std::max(0.0, lp.d.row(i).dot(state.x) - lp.e(i));
      const double ratio = slack / -rates(i);
      row_ratios.emplace_back(i, ratio);
      alpha = std::min(alpha, ratio);
    }
  }
  for (Index j : state.support) {
    if (lp.sigma(j) * xi(j) < -kRoundoff * xi_scale) {
      const double ratio = std::max(0.0, lp.sigma(j) * state.x(j)) / (-lp.sigma(j) * xi(j));
      var_ratios.emplace_back(j, ratio);
      alpha = std::min(alpha, ratio);
    }
  }
  if (!std::isfinite(alpha))
    throw SolverError(SolverErrorKind::kUnboundedStep,
                      "no blocking constraint; the LP is unbounded along the direction");

  const double cutoff = alpha + options.blocking_rel_tol * std::max(alpha, 1e-12);
  StepResult out;
  out.alpha = alpha;
  out.new_active = IndexSet(lp.num_ineq());
  out.leaving_support = IndexSet(lp.num_vars());
  for (auto [i, r] : row_ratios)
    if (r <= cutoff) out.new_active.insert(i);
  for (auto [j, r] : var_ratios)
    if (r <= cutoff) out.leaving_support.insert(j);
  return out;
}

Multipliers multipliers(const StandardLp& lp, const AsmState& state,
                        const AsmOptions& options) {
  const Index m = lp.num_eq();
  const Index k = state.active.size();
  // [A_Sᵀ  (D^A_S)ᵀ] (λ; μ_A) = c_S
  const DenseMatrix mat = direction_matrix(lp, state.active, state.support).transpose();
  const Vec rhs = subvector(lp.c, state.support);
  const SolveReport r = solve_consistent(mat, rhs, std::max(options.consistency_tol, 1e-7));
  if (!r.consistent)
    throw SolverError(SolverErrorKind::kInconsistentSystem,
                      "stationarity system on the support has residual " +
                          std::to_string(r.residual_norm));
  Multipliers out;
  out.lambda = r.solution.head(m);
  out.mu_active = r.solution.tail(k);
  out.active = state.active;
  out.inactive = state.support.complement();
  const Vec reduced = lp.c - lp.a_eq.transpose() * out.lambda -
                      select_rows(lp.d, state.active).transpose() * out.mu_active;
  out.nu_inactive = Vec(out.inactive.size());
  for (Index p = 0; p < out.inactive.size(); ++p) {
    const Index j = out.inactive[p];
    out.nu_inactive(p) = lp.sigma(j) * reduced(j);
  }
  return out;
}

AsmResult asm_solve(const StandardLp& lp, const Vec& x0, const std::optional<Vec>& xi0,
                    const AsmOptions& options) {
  lp.validate();
  if (x0.size() != lp.num_vars()) throw LinalgError("asm_solve: x0 has wrong length");
  if (!is_feasible(lp, x0, 1e-8))
    throw SolverError(SolverErrorKind::kInfeasibleStart, "x0 violates the constraints");

  const Index cap = options.max_iterations > 0
                        ? options.max_iterations
                        : 50 * (lp.num_vars() + lp.num_ineq() + lp.num_eq());
  AsmResult result;
  AsmState state = make_state(lp, x0, options);
  RelaxationLedger ledger(lp.num_ineq(), lp.num_vars());
  std::optional<Vec> pending = xi0;
  Index fixed_candidate = -1;

  auto emit_trace = [&](double alpha) {
    if (options.trace)
      options.trace({state.iteration, alpha, state.active.size(), state.support.size(),
                     lp.objective(state.x)});
    if (options.debug_hook) {
      state.recently_removed = ledger.removed_active;
      state.recently_added = ledger.added_support;
      options.debug_hook(lp, state);
    }
  };

  while (true) {
    if (state.iteration >= cap)
      throw SolverError(SolverErrorKind::kIterationLimit,
                        "active-set method exceeded " + std::to_string(cap) + " iterations");
    ++state.iteration;

    SolveReport dir;
    if (pending) {
      dir.consistent = true;
      dir.solution = *pending;
      pending.reset();
    } else {
      ++result.direction_solves;
      if (fixed_candidate >= 0 && options.fix_new_support_variable) {
        dir = find_direction_fixed(lp, state, fixed_candidate, options);
        if (!dir.consistent) dir = find_direction(lp, state, options);
      } else {
        dir = find_direction(lp, state, options);
      }
    }
    fixed_candidate = -1;

    if (dir.consistent) {
      const Vec& xi = dir.solution;
      const StepResult step = step_size(lp, state, xi, options);
      state.x += step.alpha * xi;
      for (Index j : step.leaving_support) state.x(j) = 0.0;
      state.active = state.active.unite(step.new_active);
      state.support = state.support.minus(step.leaving_support);
      const Vec rates = lp.d * xi;
      const Vec abs_xi = xi.cwiseAbs();
      const double xi_scale = norm_inf(xi);
      ledger.after_step(
          step.alpha, step, state.active, state.support,
          [&](Index i) {
            return std::abs(rates(i)) <=
                   options.zero_tol * (1e-3 + lp.d.row(i).cwiseAbs().dot(abs_xi));
          },
          [&](Index j) { return std::abs(xi(j)) <= options.zero_tol * (1e-3 + xi_scale); });
      emit_trace(step.alpha);
      continue;
    }

    ++result.multiplier_rounds;
    Multipliers mult = multipliers(lp, state, options);
    Index i_pos = -1, j_pos = -1;
    double mu_min = std::numeric_limits<double>::infinity();
    double nu_min = std::numeric_limits<double>::infinity();
    for (Index p = 0; p < mult.mu_active.size(); ++p)
      if (mult.mu_active(p) < mu_min) mu_min = mult.mu_active(p), i_pos = p;
    for (Index p = 0; p < mult.nu_inactive.size(); ++p)
      if (mult.nu_inactive(p) < nu_min) nu_min = mult.nu_inactive(p), j_pos = p;

    if (mu_min >= -options.multiplier_tol && nu_min >= -options.multiplier_tol) {
      emit_trace(std::numeric_limits<double>::quiet_NaN());
      state.recently_removed = ledger.removed_active;
      state.recently_added = ledger.added_support;
      result.x = state.x;
      result.objective = lp.objective(state.x);
      result.iterations = state.iteration;
      result.multipliers = std::move(mult);
      result.state = std::move(state);
      return result;
    }
    if (mu_min < nu_min) {
      const Index i = mult.active[i_pos];
      state.active.erase(i);
      ledger.removed_active.insert(i);
    } else {
      const Index j = mult.inactive[j_pos];
      state.support.insert(j);
      ledger.added_support.insert(j);
      fixed_candidate = j;
    }
    emit_trace(std::numeric_limits<double>::quiet_NaN());
  }
}

}  // namespace houdini
