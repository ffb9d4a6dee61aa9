#pragma once

#include "houdini/linalg.hpp"

namespace houdini {

/// min ‖x‖₁  s.t.  ‖A x − b‖∞ ≤ δ.
struct ProblemInstance {
  DenseMatrix a;
  Vec b;
  double delta = 0.0;

  Index m() const { return a.rows(); }
  Index n() const { return a.cols(); }
  /// Shapes, finiteness, m ≥ 1, n ≥ 1, δ ≥ 0.
  void validate() const;
};

/// The four index sets of a primal/dual pair plus their sign patterns.
/// Sign vectors are full length with zeros outside their set.
struct IndexSets {
  IndexSet primal_support;  // J_P = {j : xⱼ ≠ 0}
  IndexSet primal_active;   // I_P = {i : |aᵢᵀx − bᵢ| = δ}
  IndexSet dual_active;     // J_D = {j : |Aⱼᵀy| = 1}
  IndexSet dual_support;    // I_D = {i : yᵢ ≠ 0}
  Vec primal_signs;         // n, sign(xⱼ) on J_P
  Vec residual_signs;       // m, sign(aᵢᵀx − bᵢ) on I_P
  Vec dual_signs;           // m, sign(yᵢ) on I_D
};

/// Thresholds used to turn exact set definitions into floating point tests.
struct SetTolerances {
  double zero = 1e-9;    // |xⱼ| > zero ⇒ nonzero
  double active = 1e-9;  // relative slack below which a bound counts as tight
};

IndexSet primal_support_of(const Vec& x, double zero_tol);
/// Rows with | |aᵢᵀx − bᵢ| − δ | ≤ tol·(1 + δ + |bᵢ|).
IndexSet primal_active_of(const ProblemInstance& inst, const Vec& x, double delta, double tol);
/// Columns with | |Aⱼᵀy| − 1 | ≤ tol.
IndexSet dual_active_of(const ProblemInstance& inst, const Vec& y, double tol);
IndexSet dual_support_of(const Vec& y, double zero_tol);

IndexSets classify(const ProblemInstance& inst, const Vec& x, const Vec& y, double delta,
                   const SetTolerances& tol = {});

/// Iteration counters reported by the two subproblem solvers.
struct SubsolverCounters {
  Index iterations = 0;         // loop iterations (steps + multiplier rounds)
  Index direction_solves = 0;
  Index multiplier_rounds = 0;
  Index zero_steps = 0;
};

/// Tolerances shared by the specialized primal and dual active-set solvers.
struct SubsolverOptions {
  double zero_tol = 1e-9;          // support / nonzero tests
  double active_tol = 1e-9;        // tight-constraint tests
  double consistency_tol = kDefaultConsistencyTol;
  double multiplier_tol = 1e-9;
  double blocking_rel_tol = 1e-9;
  double warm_nonzero_tol = 1e-9;  // nonzero tests of the warm-start set updates
  /// 0 selects 50·(rows + columns) of the subproblem.
  Index max_iterations = 0;
};

}  // namespace houdini
