#include "houdini/homotopy.hpp"
#include "houdini/oracle.hpp"

#include <cmath>
#include <limits>

namespace houdini {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Variables e ∈ ℝ^m boxed to [−1, 1] on I_P and zero elsewhere:
//   A_{J_P}ᵀe = 0,  (Aⱼᵀŷ)(Aⱼᵀe) ≤ 0 on J_D∖J_P,  sᵢeᵢ ≥ 0 on I_P∖I_D,  sᵀe > 0.
bool system1(const ProblemInstance& inst, const Vec& y, const IndexSets& s) {
  const Index m = inst.m();
  GeneralLp lp = GeneralLp::with_vars(m);
  const Vec g = inst.a.transpose() * y;
  for (Index i = 0; i < m; ++i) {
    if (!s.primal_active.contains(i)) {
      lp.lower(i) = 0.0;
      lp.upper(i) = 0.0;
      continue;
    }
    lp.lower(i) = -1.0;
    lp.upper(i) = 1.0;
    if (!s.dual_support.contains(i)) {
      if (s.residual_signs(i) > 0.0) lp.lower(i) = 0.0;
      if (s.residual_signs(i) < 0.0) lp.upper(i) = 0.0;
    }
  }
  for (Index j : s.primal_support) lp.add_eq(inst.a.col(j), 0.0);
  for (Index j : s.dual_active.minus(s.primal_support))
    lp.add_ineq(sign(g(j)) * inst.a.col(j), 0.0);
  return strictly_feasible(lp, -s.residual_signs, 0.0);
}

// Variables d ∈ ℝⁿ, zero off J_D:
//   A^{I_D}d = −sign(ŷ_{I_D}),  sᵢaᵢᵀd ≤ −1 on I_P∖I_D,  (Aⱼᵀŷ)dⱼ ≤ 0 on J_D∖J_P.
bool system2(const ProblemInstance& inst, const Vec& y, const IndexSets& s) {
  const Index n = inst.n();
  GeneralLp lp = GeneralLp::with_vars(n);
  const Vec g = inst.a.transpose() * y;
  for (Index j = 0; j < n; ++j) {
    if (!s.dual_active.contains(j)) {
      lp.lower(j) = 0.0;
      lp.upper(j) = 0.0;
    } else if (s.primal_support.contains(j)) {
      lp.lower(j) = -kInf;
      lp.upper(j) = kInf;
    } else if (g(j) > 0.0) {
      lp.lower(j) = -kInf;
      lp.upper(j) = 0.0;
    } else {
      lp.lower(j) = 0.0;
      lp.upper(j) = kInf;
    }
  }
  for (Index i : s.dual_support) lp.add_eq(inst.a.row(i).transpose(), -sign(y(i)));
  for (Index i : s.primal_active.minus(s.dual_support))
    lp.add_ineq(s.residual_signs(i) * inst.a.row(i).transpose(), -1.0);
  return feasibility(lp);
}

}  // namespace

Alternatives check_alternatives(const ProblemInstance& inst, const Vec& x_hat, const Vec& y_hat,
                                double delta_hat, const SetTolerances& tol) {
  inst.validate();
  if (!(delta_hat >= 0.0) || !(delta_hat < norm_inf(inst.b)))
    throw SolverError(SolverErrorKind::kPrecondition,
                      "check_alternatives: need 0 <= delta < ||b||_inf");
  const PairReport rep = optimal_pair_report(inst, x_hat, y_hat, delta_hat, tol.zero);
  if (rep.sign_x > 1e-7 || rep.sign_y > 1e-7)
    throw SolverError(SolverErrorKind::kPrecondition,
                      "check_alternatives: (x, y) is not an optimal pair");
  Alternatives out;
  out.sets = classify(inst, x_hat, y_hat, delta_hat, tol);
  out.system1_feasible = system1(inst, y_hat, out.sets);
  out.system2_feasible = system2(inst, y_hat, out.sets);
  return out;
}

}  // namespace houdini
