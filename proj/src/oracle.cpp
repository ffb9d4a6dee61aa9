#include "houdini/oracle.hpp"

#include "houdini/errors.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <vector>

namespace houdini {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRayTol = 1e-7;

// Column of the standard-form matrix contributing coef·z to original variable.
struct Term {
  Index col;
  double coef;
};

struct StandardForm {
  DenseMatrix m;            // rows × cols, z ≥ 0
  Vec rhs;                  // ≥ 0 after flips
  Vec cost;                 // cols
  Vec flip;                 // ±1 per row
  Vec offset;               // original x = offset + Σ terms
  std::vector<std::vector<Term>> terms;
  Index eq_rows = 0;
  Index ineq_rows = 0;
};

StandardForm to_standard(const GeneralLp& lp) {
  const Index n = lp.num_vars();
  StandardForm sf;
  sf.offset = Vec::Zero(n);
  sf.terms.resize(n);
  Index cols = 0;
  std::vector<std::pair<Index, double>> bound_rows;  // (column, upper − lower)
  for (Index j = 0; j < n; ++j) {
    const double lo = lp.lower(j), hi = lp.upper(j);
    if (std::isfinite(lo)) {
      sf.offset(j) = lo;
      sf.terms[j].push_back({cols, 1.0});
      if (std::isfinite(hi)) bound_rows.emplace_back(cols, hi - lo);
      ++cols;
    } else if (std::isfinite(hi)) {
      sf.offset(j) = hi;
      sf.terms[j].push_back({cols++, -1.0});
    } else {
      sf.terms[j].push_back({cols++, 1.0});
      sf.terms[j].push_back({cols++, -1.0});
    }
  }
  const Index structural = cols;
  sf.eq_rows = lp.eq_matrix.rows();
  sf.ineq_rows = lp.ineq_matrix.rows();
  const Index slack_rows = sf.ineq_rows + Index(bound_rows.size());
  const Index rows = sf.eq_rows + slack_rows;
  cols += slack_rows;
  sf.m = DenseMatrix::Zero(rows, cols);
  sf.rhs = Vec::Zero(rows);
  sf.cost = Vec::Zero(cols);

  auto map_row = [&](const Vec& row, Index r, double rhs) {
    for (Index j = 0; j < n; ++j) {
      if (row(j) == 0.0) continue;
      for (const Term& t : sf.terms[j]) sf.m(r, t.col) += row(j) * t.coef;
    }
    sf.rhs(r) = rhs - row.dot(sf.offset);
  };
  for (Index i = 0; i < sf.eq_rows; ++i) map_row(lp.eq_matrix.row(i).transpose(), i, lp.eq_rhs(i));
  for (Index i = 0; i < sf.ineq_rows; ++i) {
    const Index r = sf.eq_rows + i;
    map_row(lp.ineq_matrix.row(i).transpose(), r, lp.ineq_rhs(i));
    sf.m(r, structural + i) = 1.0;
  }
  for (std::size_t b = 0; b < bound_rows.size(); ++b) {
    const Index r = sf.eq_rows + sf.ineq_rows + Index(b);
    sf.m(r, bound_rows[b].first) = 1.0;
    sf.m(r, structural + sf.ineq_rows + Index(b)) = 1.0;
    sf.rhs(r) = bound_rows[b].second;
  }
  for (Index j = 0; j < n; ++j)
    for (const Term& t : sf.terms[j]) sf.cost(t.col) += lp.cost(j) * t.coef;

  sf.flip = Vec::Ones(rows);
  for (Index r = 0; r < rows; ++r)
    if (sf.rhs(r) < 0.0) {
      sf.flip(r) = -1.0;
      sf.m.row(r) *= -1.0;
      sf.rhs(r) *= -1.0;
    }
  return sf;
}

class Tableau {
 public:
  Tableau(const StandardForm& sf, const SimplexOptions& opt)
      : rows_(sf.m.rows()), cols_(sf.m.cols()), opt_(opt) {
    t_ = DenseMatrix::Zero(rows_ + 1, cols_ + rows_ + 1);
    t_.topLeftCorner(rows_, cols_) = sf.m;
    t_.block(0, cols_, rows_, rows_).setIdentity();
    t_.topRightCorner(rows_, 1) = sf.rhs;
    basis_.resize(rows_);
    for (Index r = 0; r < rows_; ++r) basis_[r] = cols_ + r;
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  const std::vector<Index>& basis() const { return basis_; }
  Index pivots() const { return pivots_; }
  double rhs(Index r) const { return t_(r, rhs_col()); }
  double entry(Index r, Index c) const { return t_(r, c); }
  bool is_artificial(Index c) const { return c >= cols_; }

  void set_cost(const Vec& full_cost) {  // length cols_ + rows_
    t_.row(rows_).setZero();
    t_.row(rows_).head(cols_ + rows_) = full_cost.transpose();
    for (Index r = 0; r < rows_; ++r) {
      const double cb = full_cost(basis_[r]);
      if (cb != 0.0) t_.row(rows_) -= cb * t_.row(r);
    }
  }
  double objective() const { return -t_(rows_, rhs_col()); }

  // Runs Bland's rule; only columns below `allowed_cols` may enter.
  LpStatus optimize(Index allowed_cols) {
    while (true) {
      if (pivots_ >= opt_.max_pivots) return LpStatus::kIterationLimit;
      // Bland: first improving column that admits a pivot. An improving
      // column without one is a ray unless its reduced cost is round-off.
      Index enter = -1;
      double best = kInf;
      for (Index c = 0; c < allowed_cols && enter < 0; ++c) {
        if (t_(rows_, c) >= -opt_.cost_tol) continue;
        for (Index r = 0; r < rows_; ++r)
          if (t_(r, c) > opt_.pivot_tol) best = std::min(best, basic_value(r) / t_(r, c));
        if (std::isfinite(best))
          enter = c;
        else if (t_(rows_, c) < -kRayTol)
          return LpStatus::kUnbounded;
      }
      if (enter < 0) return LpStatus::kOptimal;
      const double cutoff = best + 1e-12 * (1.0 + std::abs(best));
      Index leave = -1;
      for (Index r = 0; r < rows_; ++r)
        if (t_(r, enter) > opt_.pivot_tol && basic_value(r) / t_(r, enter) <= cutoff &&
            (leave < 0 || basis_[r] < basis_[leave]))
          leave = r;
      pivot(leave, enter);
    }
  }

  // Pivots basic artificials out where possible.
  void drive_out_artificials() {
    for (Index r = 0; r < rows_; ++r) {
      if (!is_artificial(basis_[r])) continue;
      Index best = -1;
      double mag = 1e-9;
      for (Index c = 0; c < cols_; ++c)
        if (std::abs(t_(r, c)) > mag) {
          mag = std::abs(t_(r, c));
          best = c;
        }
      if (best >= 0) pivot(r, best);
    }
  }

 private:
  Index rhs_col() const { return cols_ + rows_; }
  // Round-off can leave basic values slightly negative; the ratio test treats them as 0.
  double basic_value(Index r) const { return std::max(t_(r, rhs_col()), 0.0); }

  void pivot(Index r, Index c) {
    ++pivots_;
    const double p = t_(r, c);
    t_.row(r) /= p;
    for (Index i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    t_(r, c) = 1.0;
    basis_[r] = c;
  }

  Index rows_, cols_;
  SimplexOptions opt_;
  DenseMatrix t_;
  std::vector<Index> basis_;
  Index pivots_ = 0;
};

}  // namespace

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration limit";
  }
  return "unknown";
}

GeneralLp GeneralLp::with_vars(Index n) {
  GeneralLp lp;
  lp.cost = Vec::Zero(n);
  lp.eq_matrix = DenseMatrix::Zero(0, n);
  lp.eq_rhs = Vec::Zero(0);
  lp.ineq_matrix = DenseMatrix::Zero(0, n);
  lp.ineq_rhs = Vec::Zero(0);
  lp.lower = Vec::Zero(n);
  lp.upper = Vec::Constant(n, kInf);
  return lp;
}

namespace {

void append_row(DenseMatrix& mat, Vec& rhs, const Vec& row, double value) {
  const Index r = mat.rows();
  mat.conservativeResize(r + 1, Eigen::NoChange);
  mat.row(r) = row.transpose();
  rhs.conservativeResize(r + 1);
  rhs(r) = value;
}

}  // namespace

void GeneralLp::add_eq(const Vec& row, double rhs) { append_row(eq_matrix, eq_rhs, row, rhs); }
void GeneralLp::add_ineq(const Vec& row, double rhs) {
  append_row(ineq_matrix, ineq_rhs, row, rhs);
}

void GeneralLp::validate() const {
  const Index n = cost.size();
  if (eq_matrix.cols() != n || ineq_matrix.cols() != n || lower.size() != n || upper.size() != n)
    throw LinalgError("GeneralLp: inconsistent column counts");
  if (eq_matrix.rows() != eq_rhs.size() || ineq_matrix.rows() != ineq_rhs.size())
    throw LinalgError("GeneralLp: inconsistent row counts");
  require_finite(cost, "GeneralLp cost");
  require_finite(eq_matrix, "GeneralLp eq_matrix");
  require_finite(eq_rhs, "GeneralLp eq_rhs");
  require_finite(ineq_matrix, "GeneralLp ineq_matrix");
  require_finite(ineq_rhs, "GeneralLp ineq_rhs");
  for (Index j = 0; j < n; ++j) {
    if (std::isnan(lower(j)) || std::isnan(upper(j)) || lower(j) == kInf || upper(j) == -kInf)
      throw LinalgError("GeneralLp: invalid bound");
    if (lower(j) > upper(j)) throw LinalgError("GeneralLp: lower bound exceeds upper bound");
  }
}

LpSolution simplex_solve(const GeneralLp& lp, const SimplexOptions& options) {
  lp.validate();
  const StandardForm sf = to_standard(lp);
  Tableau tab(sf, options);
  const Index rows = tab.rows(), cols = tab.cols();
  LpSolution sol;

  Vec phase1 = Vec::Zero(cols + rows);
  phase1.tail(rows).setOnes();
  tab.set_cost(phase1);
  LpStatus st = tab.optimize(cols);
  if (st == LpStatus::kIterationLimit) {
    sol.status = st;
    sol.pivots = tab.pivots();
    return sol;
  }
  if (tab.objective() > options.feasibility_tol * (1.0 + norm_inf(sf.rhs))) {
    sol.status = LpStatus::kInfeasible;
    sol.pivots = tab.pivots();
    return sol;
  }
  tab.drive_out_artificials();

  Vec phase2 = Vec::Zero(cols + rows);
  phase2.head(cols) = sf.cost;
  tab.set_cost(phase2);
  st = tab.optimize(cols);
  sol.pivots = tab.pivots();
  if (st != LpStatus::kOptimal) {
    sol.status = st;
    return sol;
  }
  sol.status = LpStatus::kOptimal;

  // Re-solve with the final basis for accuracy.
  DenseMatrix full(rows, cols + rows);
  full.leftCols(cols) = sf.m;
  full.rightCols(rows).setIdentity();
  DenseMatrix basis_mat(rows, rows);
  Vec cb(rows);
  for (Index r = 0; r < rows; ++r) {
    basis_mat.col(r) = full.col(tab.basis()[r]);
    cb(r) = tab.basis()[r] < cols ? sf.cost(tab.basis()[r]) : 0.0;
  }
  Vec z = Vec::Zero(cols + rows);
  Vec w = Vec::Zero(rows);
  if (rows > 0) {
    Eigen::FullPivLU<DenseMatrix> lu(basis_mat);
    Vec zb = lu.solve(sf.rhs);
    bool refined_ok = lu.isInvertible() && zb.allFinite();
    if (refined_ok)
      for (Index r = 0; r < rows; ++r)
        if (zb(r) < -1e-7 * (1.0 + norm_inf(sf.rhs))) refined_ok = false;
    for (Index r = 0; r < rows; ++r)
      z(tab.basis()[r]) = refined_ok ? std::max(0.0, zb(r)) : std::max(0.0, tab.rhs(r));
    if (lu.isInvertible()) w = lu.transpose().solve(cb);
  }

  const Index n = lp.num_vars();
  sol.x = sf.offset;
  for (Index j = 0; j < n; ++j)
    for (const Term& t : sf.terms[j]) sol.x(j) += t.coef * z(t.col);
  sol.value = lp.cost.dot(sol.x);

  const Vec row_duals = w.cwiseProduct(sf.flip);
  sol.dual_eq = row_duals.head(sf.eq_rows);
  sol.dual_ineq = row_duals.segment(sf.eq_rows, sf.ineq_rows);
  const Vec reduced = lp.cost - lp.eq_matrix.transpose() * sol.dual_eq -
                      lp.ineq_matrix.transpose() * sol.dual_ineq;
  sol.dual_value = lp.eq_rhs.dot(sol.dual_eq) + lp.ineq_rhs.dot(sol.dual_ineq);
  for (Index j = 0; j < n; ++j) {
    const double r = reduced(j);
    if (std::abs(r) <= 1e-12 * (1.0 + std::abs(lp.cost(j)))) continue;
    const double bound = r > 0.0 ? lp.lower(j) : lp.upper(j);
    if (std::isfinite(bound)) sol.dual_value += r * bound;
  }
  return sol;
}

bool feasibility(const GeneralLp& lp, const SimplexOptions& options) {
  GeneralLp copy = lp;
  copy.cost.setZero();
  return simplex_solve(copy, options).status == LpStatus::kOptimal;
}

bool strictly_feasible(const GeneralLp& lp, const Vec& strict_row, double strict_rhs,
                       double threshold, const SimplexOptions& options) {
  const Index n = lp.num_vars();
  if (strict_row.size() != n) throw LinalgError("strictly_feasible: row has the wrong length");
  GeneralLp ext = GeneralLp::with_vars(n + 1);
  ext.cost.setZero();
  ext.cost(n) = -1.0;
  ext.lower.head(n) = lp.lower;
  ext.upper.head(n) = lp.upper;
  ext.lower(n) = 0.0;
  ext.upper(n) = 1.0;
  ext.eq_matrix = DenseMatrix::Zero(lp.eq_matrix.rows(), n + 1);
  ext.eq_matrix.leftCols(n) = lp.eq_matrix;
  ext.eq_rhs = lp.eq_rhs;
  ext.ineq_matrix = DenseMatrix::Zero(lp.ineq_matrix.rows(), n + 1);
  ext.ineq_matrix.leftCols(n) = lp.ineq_matrix;
  ext.ineq_rhs = lp.ineq_rhs;
  Vec row = Vec::Zero(n + 1);
  row.head(n) = strict_row;
  row(n) = 1.0;
  ext.add_ineq(row, strict_rhs);
  const LpSolution sol = simplex_solve(ext, options);
  return sol.status == LpStatus::kOptimal && sol.x(n) > threshold;
}

GeneralLp reformulate(const ProblemInstance& inst) {
  inst.validate();
  const Index m = inst.m(), n = inst.n();
  GeneralLp lp = GeneralLp::with_vars(2 * n + 2 * m);
  lp.cost.head(2 * n).setOnes();
  lp.eq_matrix = DenseMatrix::Zero(2 * m, 2 * n + 2 * m);
  lp.eq_matrix.block(0, 0, m, n) = inst.a;
  lp.eq_matrix.block(0, n, m, n) = -inst.a;
  lp.eq_matrix.block(0, 2 * n, m, m).setIdentity();
  lp.eq_matrix.block(m, 0, m, n) = -inst.a;
  lp.eq_matrix.block(m, n, m, n) = inst.a;
  lp.eq_matrix.block(m, 2 * n + m, m, m).setIdentity();
  lp.eq_rhs.resize(2 * m);
  lp.eq_rhs.head(m) = inst.b.array() + inst.delta;
  lp.eq_rhs.tail(m) = -inst.b.array() + inst.delta;
  return lp;
}

Vec recover_x(const Vec& split_solution, Index n) {
  if (split_solution.size() < 2 * n) throw LinalgError("recover_x: solution too short");
  return split_solution.head(n) - split_solution.segment(n, n);
}

double reference_objective(const ProblemInstance& inst) {
  const LpSolution sol = simplex_solve(reformulate(inst));
  if (sol.status != LpStatus::kOptimal)
    throw SolverError(SolverErrorKind::kPrecondition,
                      std::string("reference LP not solved: ") + to_string(sol.status));
  return sol.value;
}

double basis_pursuit_value(const DenseMatrix& a, const Vec& b) {
  const Index n = a.cols();
  GeneralLp lp = GeneralLp::with_vars(2 * n);
  lp.cost.setOnes();
  lp.eq_matrix.resize(a.rows(), 2 * n);
  lp.eq_matrix << a, -a;
  lp.eq_rhs = b;
  const LpSolution sol = simplex_solve(lp);
  if (sol.status != LpStatus::kOptimal)
    throw SolverError(SolverErrorKind::kPrecondition,
                      std::string("basis pursuit LP not solved: ") + to_string(sol.status));
  return sol.value;
}

Vec certificate_l1(const DenseMatrix& a, const Vec& x_bar) {
  const Index m = a.rows(), n = a.cols();
  if (x_bar.size() != n) throw LinalgError("certificate_l1: x_bar has the wrong length");
  GeneralLp lp = GeneralLp::with_vars(2 * m);
  lp.cost.setOnes();
  for (Index j = 0; j < n; ++j) {
    Vec row(2 * m);
    row << -a.col(j), a.col(j);  // −Aⱼᵀ(y⁺ − y⁻)
    if (x_bar(j) != 0.0) {
      lp.add_eq(row, sign(x_bar(j)));
    } else {
      lp.add_ineq(row, 1.0);
      lp.add_ineq(-row, 1.0);
    }
  }
  const LpSolution sol = simplex_solve(lp);
  if (sol.status != LpStatus::kOptimal)
    throw SolverError(SolverErrorKind::kPrecondition,
                      "certificate_l1: no certificate exists (x_bar is not basis pursuit optimal)");
  return sol.x.head(m) - sol.x.tail(m);
}

GeneralLp primal_step_lp(const ProblemInstance& inst, const Vec& y, const IndexSet& dual_support,
                         const IndexSet& dual_active, double delta_k, double delta_target) {
  const Index m = inst.m(), n = inst.n();
  GeneralLp lp = GeneralLp::with_vars(n + 1);
  lp.cost(n) = -1.0;
  const Vec g = inst.a.transpose() * y;
  for (Index j = 0; j < n; ++j) {
    if (!dual_active.contains(j)) {
      lp.lower(j) = 0.0;
      lp.upper(j) = 0.0;
    } else if (g(j) > 0.0) {
      lp.lower(j) = -kInf;
      lp.upper(j) = 0.0;
    } else if (g(j) < 0.0) {
      lp.lower(j) = 0.0;
      lp.upper(j) = kInf;
    } else {
      lp.lower(j) = -kInf;
      lp.upper(j) = kInf;
    }
  }
  lp.lower(n) = -kInf;
  lp.upper(n) = delta_k - delta_target;
  for (Index i = 0; i < m; ++i) {
    Vec row(n + 1);
    row.head(n) = inst.a.row(i).transpose();
    if (dual_support.contains(i)) {
      const double s = sign(y(i));
      row(n) = s;
      lp.add_eq(row, delta_k * s + inst.b(i));
    } else {
      row(n) = 1.0;
      lp.add_ineq(row, delta_k + inst.b(i));
      row.head(n) *= -1.0;
      lp.add_ineq(row, delta_k - inst.b(i));
    }
  }
  return lp;
}

GeneralLp dual_certificate_lp(const ProblemInstance& inst, const Vec& x,
                              const IndexSet& primal_support, const IndexSet& primal_active,
                              const Vec& residual_signs) {
  const Index m = inst.m(), n = inst.n();
  GeneralLp lp = GeneralLp::with_vars(m);
  for (Index i = 0; i < m; ++i) {
    const double s = primal_active.contains(i) ? residual_signs(i) : 0.0;
    lp.cost(i) = -s;
    if (s > 0.0) {
      lp.lower(i) = 0.0;
      lp.upper(i) = kInf;
    } else if (s < 0.0) {
      lp.lower(i) = -kInf;
      lp.upper(i) = 0.0;
    } else {
      lp.lower(i) = 0.0;
      lp.upper(i) = 0.0;
    }
  }
  for (Index j = 0; j < n; ++j) {
    const Vec col = inst.a.col(j);
    if (primal_support.contains(j)) {
      lp.add_eq(-col, sign(x(j)));
    } else {
      lp.add_ineq(col, 1.0);
      lp.add_ineq(-col, 1.0);
    }
  }
  return lp;
}

}  // namespace houdini
