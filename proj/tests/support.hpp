#pragma once
// Helpers shared by the unit tests and the acceptance binary: subproblem
// snapshots rebuilt from a computed path, and their StandardLp encodings.

#include "houdini/asm_lp.hpp"
#include "houdini/dual_update.hpp"
#include "houdini/homotopy.hpp"
#include "houdini/primal_update.hpp"

#include <cmath>
#include <random>

namespace houdini::testing {

inline Vec mat_vec(std::initializer_list<double> v) {
  Vec out(static_cast<Index>(v.size()));
  Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

/// Dual context at breakpoint k (k ≥ 1), set up the way the driver does.
inline DualContext dual_snapshot(const ProblemInstance& inst, const PathBreakpoint& bp,
                                 double tol = 1e-9) {
  DualContext ctx;
  ctx.x_k = bp.x;
  ctx.y_start = bp.y;
  IndexSets& s = ctx.index_sets;
  s.primal_support = primal_support_of(bp.x, tol);
  const IndexSet dual_support = dual_support_of(bp.y, tol);
  s.primal_active = primal_active_of(inst, bp.x, bp.delta, tol).unite(dual_support);
  s.primal_signs = sign(bp.x);
  const Vec r = inst.a * bp.x - inst.b;
  s.residual_signs = Vec::Zero(inst.m());
  for (Index i : s.primal_active)
    s.residual_signs(i) = dual_support.contains(i) ? sign(bp.y(i)) : sign(r(i));
  return ctx;
}

inline PrimalContext primal_snapshot(const ProblemInstance& inst, const DualContext& dctx,
                                     const DualUpdateResult& dual, double delta_k) {
  PrimalContext ctx;
  ctx.y_next = dual.y;
  ctx.delta_k = delta_k;
  ctx.delta_target = inst.delta;
  ctx.x_start = dctx.x_k;
  ctx.index_sets = dctx.index_sets;
  ctx.index_sets.dual_active = dual.dual_active;
  ctx.index_sets.dual_support = dual.dual_support;
  ctx.index_sets.dual_signs = sign(dual.y);
  return ctx;
}

/// Certificate LP over ψ_{I_P}:
///   min −sᵀψ  s.t.  −(A^{I_P}_{J_P})ᵀψ = sign(x_{J_P}),  ±A_jᵀψ ≥ −1 (j ∉ J_P),  sᵢψᵢ ≥ 0.
struct DualEncoding {
  StandardLp lp;
  Vec start;
};

inline DualEncoding encode_dual(const ProblemInstance& inst, const DualContext& ctx) {
  const IndexSets& s = ctx.index_sets;
  const IndexSet& ip = s.primal_active;
  const IndexSet& jp = s.primal_support;
  const IndexSet rest = jp.complement();
  const DenseMatrix a_ip = select_rows(inst.a, ip);  // |I_P| × n
  DualEncoding enc;
  StandardLp& lp = enc.lp;
  const Index p = ip.size();
  lp.c = -subvector(s.residual_signs, ip);
  lp.a_eq = -select_cols(a_ip, jp).transpose();
  lp.b_eq = subvector(s.primal_signs, jp);
  lp.d.resize(2 * rest.size(), p);
  lp.e = Vec::Constant(2 * rest.size(), -1.0);
  for (Index k = 0; k < rest.size(); ++k) {
    lp.d.row(2 * k) = -a_ip.col(rest[k]).transpose();
    lp.d.row(2 * k + 1) = a_ip.col(rest[k]).transpose();
  }
  lp.sigma = subvector(s.residual_signs, ip);
  enc.start = subvector(ctx.y_start, ip);
  return enc;
}

/// Step LP over (ξ_{J_D}, τ):
///   min −τ  s.t.  A^{I_D}_{J_D}ξ + τ s_{I_D} = b_{I_D} + δᵏ s_{I_D},
///                 δᵏ − τ ≥ ±(aᵢᵀξ − bᵢ) (i ∉ I_D),  τ ≤ δᵏ − δ,
///                 −sign(Aⱼᵀy)ξⱼ ≥ 0,  τ ≥ 0.
struct PrimalEncoding {
  StandardLp lp;
  Vec start;
};

inline PrimalEncoding encode_primal(const ProblemInstance& inst, const PrimalContext& ctx) {
  const IndexSets& s = ctx.index_sets;
  const IndexSet& id = s.dual_support;
  const IndexSet& jd = s.dual_active;
  const IndexSet others = id.complement();
  const Index q = jd.size();
  const DenseMatrix a_jd = select_cols(inst.a, jd);
  const Vec sy = sign(ctx.y_next);
  PrimalEncoding enc;
  StandardLp& lp = enc.lp;
  lp.c = Vec::Zero(q + 1);
  lp.c(q) = -1.0;
  lp.a_eq.resize(id.size(), q + 1);
  lp.b_eq.resize(id.size());
  for (Index k = 0; k < id.size(); ++k) {
    const Index i = id[k];
    lp.a_eq.row(k).head(q) = a_jd.row(i);
    lp.a_eq(k, q) = sy(i);
    lp.b_eq(k) = inst.b(i) + ctx.delta_k * sy(i);
  }
  lp.d = DenseMatrix::Zero(2 * others.size() + 1, q + 1);
  lp.e.resize(2 * others.size() + 1);
  for (Index k = 0; k < others.size(); ++k) {
    const Index i = others[k];
    lp.d.row(2 * k).head(q) = -a_jd.row(i);
    lp.d(2 * k, q) = -1.0;
    lp.e(2 * k) = -ctx.delta_k - inst.b(i);
    lp.d.row(2 * k + 1).head(q) = a_jd.row(i);
    lp.d(2 * k + 1, q) = -1.0;
    lp.e(2 * k + 1) = inst.b(i) - ctx.delta_k;
  }
  lp.d(2 * others.size(), q) = -1.0;
  lp.e(2 * others.size()) = -(ctx.delta_k - ctx.delta_target);
  lp.sigma.resize(q + 1);
  const Vec aty = inst.a.transpose() * ctx.y_next;
  for (Index k = 0; k < q; ++k) lp.sigma(k) = aty(jd[k]) > 0 ? -1.0 : 1.0;
  lp.sigma(q) = 1.0;
  enc.start = Vec::Zero(q + 1);
  enc.start.head(q) = subvector(ctx.x_start, jd);
  return enc;
}

/// δ drawn uniformly in [lo, hi]·‖b‖∞.
inline double random_delta(const ProblemInstance& inst, std::mt19937_64& rng, double lo = 0.05,
                           double hi = 0.95) {
  std::uniform_real_distribution<double> u(lo, hi);
  return u(rng) * norm_inf(inst.b);
}

}  // namespace houdini::testing
