#pragma once

// Primal step of the homotopy. Given a fresh certificate y with support I_D
// and tight columns J_D, find (ξ, τ) with ξ supported on J_D solving
//
//   max  τ   s.t.  A^{I_D}ξ − b_{I_D} = (δᵏ − τ)·sign(y_{I_D}),
//                  |aᵢᵀξ − bᵢ| ≤ δᵏ − τ         for i ∉ I_D,
//                  (Aⱼᵀy)·ξⱼ ≤ 0                for j ∈ J_D,
//                  τ ≤ δᵏ − δ.
//
// The rows with |aᵢᵀξ − bᵢ| = δᵏ − τ form I_P, the support of ξ is J_P. The
// variable τ stays in the support throughout, so every direction has d_τ = 1.

#include "houdini/errors.hpp"
#include "houdini/problem.hpp"

#include <optional>

namespace houdini {

struct PrimalContext {
  Vec y_next;           // m
  double delta_k = 0.0;
  double delta_target = 0.0;
  Vec x_start;          // n, zero off J_D
  /// J_P, I_P and residual signs at x_start; J_D, I_D and dual signs of y_next.
  IndexSets index_sets;
  std::optional<Vec> warm_direction;  // d̂ (n), zero off J_D
};

struct PrimalIterate {
  Vec xi;                  // n
  double tau = 0.0;
  IndexSet primal_active;  // I_P
  IndexSet primal_support; // J_P
  Vec signs;               // m; sign(yᵢ) on I_D, residual sign on the rest of I_P
};

/// Starting iterate (x_start, 0) with the sets and signs from the context.
PrimalIterate make_primal_iterate(const PrimalContext& ctx);

struct PrimalStep {
  double alpha = 0.0;
  bool reached_target = false;
  PrimalIterate next;
  IndexSet joining;           // rows that became tight
  IndexSet leaving;           // columns that reached zero
  Index ambiguous_columns = 0;  // J_P columns skipped because |Aⱼᵀy| was below tolerance
};

struct PrimalMultipliers {
  Vec e_hat;          // m, zero off I_P
  Vec mu;             // aligned with mu_index = I_P∖I_D
  Vec nu;             // aligned with nu_index = J_D∖J_P
  IndexSet mu_index;
  IndexSet nu_index;
  bool optimal(double tol) const;
};

struct PrimalUpdateResult {
  Vec x;                       // n
  double t = 0.0;
  bool reached_target = false;
  std::optional<Vec> e_hat;    // from the final multiplier round
  IndexSet primal_active;
  IndexSet primal_support;
  Vec signs;
  bool warm_started = false;
  Index ambiguous_columns = 0;
  SubsolverCounters counters;
};

/// Solves A^{I_P}_{J_P} d = −s_{I_P}. The solution is the full n-vector d,
/// zero off J_P; the τ component is implicitly 1.
SolveReport primal_direction(const ProblemInstance& inst, const PrimalIterate& it,
                             double consistency_tol = kDefaultConsistencyTol);

PrimalStep primal_step(const ProblemInstance& inst, const PrimalContext& ctx, const Vec& d,
                       const PrimalIterate& it, const SubsolverOptions& options = {});

PrimalMultipliers primal_multipliers(const ProblemInstance& inst, const PrimalContext& ctx,
                                     const PrimalIterate& it,
                                     const SubsolverOptions& options = {});

PrimalUpdateResult primal_update(const ProblemInstance& inst, const PrimalContext& ctx,
                                 const SubsolverOptions& options = {});

}  // namespace houdini
