#pragma once

// Reference LP machinery for verification: a dense two-phase tableau simplex
// with Bland's rule, plus LP encodings of the problems solved by the homotopy.
// Meant for desk-scale instances only.

#include "houdini/linalg.hpp"
#include "houdini/problem.hpp"

namespace houdini {

/// min costᵀx  s.t.  eq_matrix x = eq_rhs,  ineq_matrix x ≤ ineq_rhs,
///                   lower ≤ x ≤ upper  (bounds may be infinite).
struct GeneralLp {
  Vec cost;
  DenseMatrix eq_matrix;
  Vec eq_rhs;
  DenseMatrix ineq_matrix;
  Vec ineq_rhs;
  Vec lower;
  Vec upper;

  /// n variables, zero cost, x ≥ 0, no rows.
  static GeneralLp with_vars(Index n);
  Index num_vars() const { return cost.size(); }
  void add_eq(const Vec& row, double rhs);
  void add_ineq(const Vec& row, double rhs);
  void validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

const char* to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  Vec x;
  double value = 0.0;
  Vec dual_eq;      // multipliers of the equality rows
  Vec dual_ineq;    // multipliers of the ≤ rows (nonpositive at an optimum)
  double dual_value = 0.0;
  Index pivots = 0;
};

struct SimplexOptions {
  double pivot_tol = 1e-9;
  double cost_tol = 1e-10;
  double feasibility_tol = 1e-9;
  Index max_pivots = 200000;
};

LpSolution simplex_solve(const GeneralLp& lp, const SimplexOptions& options = {});

/// Phase 1 only.
bool feasibility(const GeneralLp& lp, const SimplexOptions& options = {});

/// Whether some feasible x has strict_rowᵀx < strict_rhs: the slack s of
/// strict_rowᵀx + s ≤ strict_rhs is maximized over s ∈ [0, 1] and compared
/// with the threshold.
bool strictly_feasible(const GeneralLp& lp, const Vec& strict_row, double strict_rhs,
                       double threshold = 1e-9, const SimplexOptions& options = {});

/// Split form with variables (x⁺, x⁻, s⁺, s⁻) ≥ 0 and rows
/// [A −A I 0; −A A 0 I] = (b + δ𝟙; −b + δ𝟙).
GeneralLp reformulate(const ProblemInstance& inst);
Vec recover_x(const Vec& split_solution, Index n);

/// Optimal value of the instance through reformulate().
double reference_objective(const ProblemInstance& inst);

/// min ‖x‖₁ s.t. A x = b.
double basis_pursuit_value(const DenseMatrix& a, const Vec& b);

/// min ‖y‖₁ s.t. −Aᵀy ∈ Sign(x̄). Throws SolverError if infeasible.
Vec certificate_l1(const DenseMatrix& a, const Vec& x_bar);

/// Step LP of the primal update in variables (x, t) with cost −t:
/// equalities on I_D, two-sided rows elsewhere, sign bounds on J_D, x = 0 off J_D,
/// t ≤ δᵏ − δ.
GeneralLp primal_step_lp(const ProblemInstance& inst, const Vec& y, const IndexSet& dual_support,
                         const IndexSet& dual_active, double delta_k, double delta_target);

/// Certificate LP of the dual update in variables ψ (zero off I_P) with cost −sᵀψ.
GeneralLp dual_certificate_lp(const ProblemInstance& inst, const Vec& x,
                              const IndexSet& primal_support, const IndexSet& primal_active,
                              const Vec& residual_signs);

}  // namespace houdini
