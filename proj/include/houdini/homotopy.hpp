#pragma once

// Homotopy in the constraint level δ for
//
//   min ‖x‖₁  s.t.  ‖A x − b‖∞ ≤ δ.
//
// Starting from δ⁰ = ‖b‖∞ with x⁰ = 0, the driver alternates a dual update
// (new certificate y for the current x) and a primal update (largest decrease
// t of δ keeping an optimal pair) until the target δ is reached. The primal
// path is piecewise linear in δ and the dual path piecewise constant.

#include "houdini/dual_update.hpp"
#include "houdini/errors.hpp"
#include "houdini/primal_update.hpp"
#include "houdini/problem.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace houdini {

struct PathBreakpoint {
  Index k = 0;
  double delta = 0.0;   // δᵏ
  Vec x;                // xᵏ
  Vec y;                // certificate valid for xᵏ and the segment below δᵏ
  IndexSets sets;
  double t_step = 0.0;  // δᵏ⁻¹ − δᵏ, 0 for k = 0
};

enum class Termination { kTargetReached, kFailure };

const char* to_string(Termination t);

struct PhaseTiming {
  double dual_seconds = 0.0;
  double primal_seconds = 0.0;
  double refresh_seconds = 0.0;
};

struct PathStatistics {
  Index dual_iterations = 0;
  Index primal_iterations = 0;
  Index direction_solves = 0;
  Index multiplier_rounds = 0;
  Index warm_starts_used = 0;
  Index degeneracy_retries = 0;
  Index ambiguous_columns = 0;
  PhaseTiming timing;
};

struct SolutionPath {
  std::vector<PathBreakpoint> breakpoints;
  Termination terminated = Termination::kFailure;
  std::string message;             // failure diagnostics, empty on success
  std::optional<SolverErrorKind> failure_kind;
  double delta_target = 0.0;
  PathStatistics stats;

  const PathBreakpoint& final_breakpoint() const { return breakpoints.back(); }
  bool ok() const { return terminated == Termination::kTargetReached; }
};

struct HomotopyTraceEntry {
  Index k;
  double delta;
  double t;
  Index primal_support, primal_active, dual_active, dual_support;
  Index dual_iterations, primal_iterations;
  bool dual_warm, primal_warm;
};

struct HomotopyOptions {
  SubsolverOptions subsolver;
  SetTolerances sets;
  bool warm_start = true;
  /// 0 selects 20·(m + n).
  Index max_iterations = 0;
  /// Steps t at or below this count as degenerate.
  double min_step = 1e-12;
  std::function<void(const HomotopyTraceEntry&)> trace;
};

/// Residuals of the optimality conditions of a pair (x, y) at level δ.
struct PairReport {
  double sign_x = 0.0;       // violation of −Aᵀy ∈ Sign(x)
  double sign_y = 0.0;       // violation of Ax − b ∈ δ·Sign(y)
  double gap = 0.0;          // |‖x‖₁ − (−bᵀy − δ‖y‖₁)|
  double primal_value = 0.0;
  double dual_value = 0.0;
};

PairReport optimal_pair_report(const ProblemInstance& inst, const Vec& x, const Vec& y,
                               double delta, double support_tol = 1e-9);

/// −Aᵀy ∈ Sign(x) and Ax − b ∈ δ·Sign(y), both within tol.
bool check_optimal_pair(const ProblemInstance& inst, const Vec& x, const Vec& y, double delta,
                        double tol);

SolutionPath solve_path(const ProblemInstance& inst, const HomotopyOptions& options = {});

/// x interpolated linearly in δ between the bracketing breakpoints, y from the
/// segment containing δ (the breakpoint's own y at an exact breakpoint).
std::pair<Vec, Vec> eval_path(const SolutionPath& path, double delta);

struct Alternatives {
  bool system1_feasible = false;
  bool system2_feasible = false;
  IndexSets sets;
};

/// Decides the two alternative systems at an optimal pair (x̂, ŷ) for δ̂:
/// system 1 in e (no decrease of δ possible), system 2 in d (a decrease exists).
Alternatives check_alternatives(const ProblemInstance& inst, const Vec& x_hat,
                                const Vec& y_hat, double delta_hat,
                                const SetTolerances& tol = {1e-8, 1e-8});

}  // namespace houdini
