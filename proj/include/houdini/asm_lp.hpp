#pragma once

// Active-set method for linear programs of the form
//
//   min  cᵀx   s.t.  A x = b,  D x ≥ e,  diag(σ) x ≥ 0,   σ ∈ {±1}ⁿ.
//
// Iterates stay feasible. Each iteration either moves along a direction that
// keeps the active inequality rows and the support fixed, or, when no such
// direction exists, computes reduced Lagrange multipliers and relaxes exactly
// one index (an active row or a zero variable).

#include "houdini/errors.hpp"
#include "houdini/linalg.hpp"

#include <functional>
#include <optional>

namespace houdini {

struct StandardLp {
  Vec c;               // n
  DenseMatrix a_eq;    // m × n
  Vec b_eq;            // m
  DenseMatrix d;       // k × n
  Vec e;               // k
  Vec sigma;           // n, entries ±1

  Index num_vars() const { return c.size(); }
  Index num_eq() const { return a_eq.rows(); }
  Index num_ineq() const { return d.rows(); }

  /// Throws LinalgError on inconsistent shapes, non-finite data or σ ∉ {±1}.
  void validate() const;
  double objective(const Vec& x) const { return c.dot(x); }
};

struct AsmState {
  Vec x;
  IndexSet active;            // tight rows of D
  IndexSet support;           // nonzero variables
  IndexSet recently_removed;  // rows consecutively dropped from `active`
  IndexSet recently_added;    // variables consecutively added to `support`
  Index iteration = 0;
};

/// Reduced multipliers. `mu_active` is aligned with `active`, `nu_inactive`
/// with `inactive` (= complement of the support). All other entries of μ
/// and ν are zero.
struct Multipliers {
  Vec lambda;
  Vec mu_active;
  Vec nu_inactive;
  IndexSet active;
  IndexSet inactive;

  Vec full_mu() const { return scatter(mu_active, active); }
  Vec full_nu() const { return scatter(nu_inactive, inactive); }
  bool optimal(double tol) const;
};

struct AsmTraceEntry {
  Index iteration;
  double alpha;       // NaN for multiplier rounds
  Index active_size;
  Index support_size;
  double objective;
};

struct AsmOptions {
  double active_tol = 1e-9;        // |dᵢᵀx − eᵢ| ≤ tol·(1+|eᵢ|) ⇒ active
  double support_tol = 1e-9;       // |xⱼ| > tol ⇒ in support
  double consistency_tol = kDefaultConsistencyTol;
  double multiplier_tol = 1e-9;    // μ, ν ≥ −tol ⇒ optimal
  double blocking_rel_tol = 1e-9;  // ratios within this of the minimum all block
  double zero_tol = 1e-9;          // "dᵢᵀξ = 0" and "ξⱼ = 0" in the ledger rules
  /// 0 selects 50·(n + k + m).
  Index max_iterations = 0;
  /// Use the reduced direction system after a support variable was added.
  bool fix_new_support_variable = true;
  std::function<void(const AsmTraceEntry&)> trace;
  /// Invoked after every iteration with the current state.
  std::function<void(const StandardLp&, const AsmState&)> debug_hook;
};

struct StepResult {
  double alpha = 0.0;
  IndexSet new_active;       // blocking inequality rows
  IndexSet leaving_support;  // variables that reach zero
};

struct AsmResult {
  Vec x;
  AsmState state;
  Multipliers multipliers;
  double objective = 0.0;
  Index iterations = 0;
  Index direction_solves = 0;
  Index multiplier_rounds = 0;
};

/// Bookkeeping of indices relaxed in consecutive multiplier rounds, and the
/// two special cases applied after a step along a new direction.
struct RelaxationLedger {
  IndexSet removed_active;
  IndexSet added_support;

  RelaxationLedger() = default;
  RelaxationLedger(Index rows, Index vars) : removed_active(rows), added_support(vars) {}

  Index size() const { return removed_active.size() + added_support.size(); }

  /// Applies the post-step rules. `rate_is_zero(i)` tells whether the row
  /// rate along the direction vanishes, `component_is_zero(j)` whether the
  /// direction's j-th component vanishes.
  template <class RateZero, class ComponentZero>
  void after_step(double alpha, const StepResult& step, IndexSet& active, IndexSet& support,
                  RateZero rate_is_zero, ComponentZero component_is_zero) {
    if (alpha <= 0.0) {
      removed_active = removed_active.minus(step.new_active);
      added_support = added_support.minus(step.leaving_support);
      return;
    }
    if (size() > 1) {
      for (Index i : removed_active)
        if (rate_is_zero(i)) active.insert(i);
      for (Index j : added_support)
        if (component_is_zero(j)) support.erase(j);
    }
    // A positive step ends the run of consecutive relaxations.
    removed_active = IndexSet(removed_active.universe());
    added_support = IndexSet(added_support.universe());
  }
};

/// Full KKT test with full-length λ (m), μ (k), ν (n).
bool kkt_check(const StandardLp& lp, const Vec& x, const Vec& lambda, const Vec& mu,
               const Vec& nu, double tol);

bool is_feasible(const StandardLp& lp, const Vec& x, double tol);

/// Classifies active rows and support of a feasible point.
AsmState make_state(const StandardLp& lp, const Vec& x, const AsmOptions& options = {});

/// Solves [A_S; D^A_S; c_Sᵀ] ξ_S = (0, 0, −1), ξ_{Sᶜ} = 0. The report's
/// solution is the full n-vector ξ.
SolveReport find_direction(const StandardLp& lp, const AsmState& state,
                           const AsmOptions& options = {});

/// Largest feasible step along ξ and the blocking sets.
StepResult step_size(const StandardLp& lp, const AsmState& state, const Vec& xi,
                     const AsmOptions& options = {});

/// λ, μ_A from A_Sᵀλ + (D^A_S)ᵀμ_A = c_S; ν on the complement of the support.
Multipliers multipliers(const StandardLp& lp, const AsmState& state,
                        const AsmOptions& options = {});

AsmResult asm_solve(const StandardLp& lp, const Vec& x0, const std::optional<Vec>& xi0 = {},
                    const AsmOptions& options = {});

}  // namespace houdini
