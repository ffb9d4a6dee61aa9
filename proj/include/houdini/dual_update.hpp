#pragma once

// Dual certificate update. Given the current primal iterate x_k with support
// J_P and tight rows I_P, find ψ ∈ ℝ^m, zero off I_P, solving
//
//   min  −sᵀψ   s.t.  −(A^{I_P}_{J_P})ᵀψ = sign(x_{J_P}),
//                     |Aⱼᵀψ| ≤ 1  for j ∉ J_P,
//                     sᵢψᵢ ≥ 0    for i ∈ I_P,
//
// where s = sign(A x_k − b) on I_P. The support of ψ is I_D, the columns with
// |Aⱼᵀψ| = 1 form J_D ⊇ J_P.

#include "houdini/errors.hpp"
#include "houdini/problem.hpp"

#include <optional>

namespace houdini {

struct DualContext {
  Vec x_k;                            // n
  IndexSets index_sets;               // uses J_P, I_P, primal and residual signs
  Vec y_start;                        // m, feasible; entries off I_P are ignored
  std::optional<Vec> warm_direction;  // ê (m), zero off I_P
};

/// Builds a context for x_k and a feasible start, classifying J_P and I_P at δ.
DualContext make_dual_context(const ProblemInstance& inst, const Vec& x_k, double delta,
                              const Vec& y_start, const SetTolerances& tol = {});

struct DualStep {
  double alpha = 0.0;
  Vec psi;                // ψ + αe with exact zeros on leaving rows
  IndexSet dual_support;  // I_D after the step
  IndexSet dual_active;   // J_D after the step
  IndexSet leaving;       // rows of I_D that reached zero
  IndexSet joining;       // columns that reached |Aⱼᵀψ| = 1
};

struct DualMultipliers {
  Vec d_hat;          // n, zero off J_D
  Vec mu;             // aligned with mu_index = J_D∖J_P
  Vec nu;             // aligned with nu_index = I_P∖I_D
  IndexSet mu_index;
  IndexSet nu_index;
  bool optimal(double tol) const;
};

struct DualUpdateResult {
  Vec y;                  // m, zero off I_P
  Vec d_hat;              // n, from the final multiplier round
  IndexSet dual_support;  // I_D
  IndexSet dual_active;   // J_D
  double objective = 0.0; // −sᵀy
  bool warm_started = false;
  SubsolverCounters counters;
};

/// Solves (A^{I_D}_{J_D})ᵀe = 0, s_{I_D}ᵀe = 1. The solution is the full
/// m-vector e, zero off I_D.
SolveReport dual_direction(const ProblemInstance& inst, const DualContext& ctx,
                           const IndexSet& dual_support, const IndexSet& dual_active,
                           double consistency_tol = kDefaultConsistencyTol);

DualStep dual_step(const ProblemInstance& inst, const DualContext& ctx, const Vec& e,
                   const Vec& psi, const IndexSet& dual_support, const IndexSet& dual_active,
                   const SubsolverOptions& options = {});

DualMultipliers dual_multipliers(const ProblemInstance& inst, const DualContext& ctx,
                                 const Vec& psi, const IndexSet& dual_support,
                                 const IndexSet& dual_active,
                                 const SubsolverOptions& options = {});

DualUpdateResult dual_update(const ProblemInstance& inst, const DualContext& ctx,
                             const SubsolverOptions& options = {});

}  // namespace houdini
