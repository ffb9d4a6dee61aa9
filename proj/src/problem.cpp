#include "houdini/problem.hpp"

#include <cmath>

namespace houdini {

void ProblemInstance::validate() const {
  if (a.rows() < 1 || a.cols() < 1) throw LinalgError("instance: A must be at least 1x1");
  if (b.size() != a.rows())
    throw LinalgError("instance: b has length " + std::to_string(b.size()) + ", A has " +
                      std::to_string(a.rows()) + " rows");
  require_finite(a, "instance A");
  require_finite(b, "instance b");
  if (!std::isfinite(delta) || delta < 0.0)
    throw LinalgError("instance: delta must be finite and nonnegative");
}

IndexSet primal_support_of(const Vec& x, double zero_tol) {
  IndexSet s(x.size());
  for (Index j = 0; j < x.size(); ++j)
    if (std::abs(x(j)) > zero_tol) s.insert(j);
  return s;
}

IndexSet primal_active_of(const ProblemInstance& inst, const Vec& x, double delta, double tol) {
  const Vec r = inst.a * x - inst.b;
  IndexSet s(inst.m());
  for (Index i = 0; i < inst.m(); ++i)
    if (std::abs(std::abs(r(i)) - delta) <= tol * (1.0 + delta + std::abs(inst.b(i)))) s.insert(i);
  return s;
}

IndexSet dual_active_of(const ProblemInstance& inst, const Vec& y, double tol) {
  const Vec g = inst.a.transpose() * y;
  IndexSet s(inst.n());
  for (Index j = 0; j < inst.n(); ++j)
    if (std::abs(std::abs(g(j)) - 1.0) <= tol) s.insert(j);
  return s;
}

IndexSet dual_support_of(const Vec& y, double zero_tol) { return primal_support_of(y, zero_tol); }

IndexSets classify(const ProblemInstance& inst, const Vec& x, const Vec& y, double delta,
                   const SetTolerances& tol) {
  IndexSets s;
  s.primal_support = primal_support_of(x, tol.zero);
  s.primal_active = primal_active_of(inst, x, delta, tol.active);
  s.dual_active = dual_active_of(inst, y, tol.active);
  s.dual_support = dual_support_of(y, tol.zero);
  const Vec r = inst.a * x - inst.b;
  s.primal_signs = Vec::Zero(inst.n());
  for (Index j : s.primal_support) s.primal_signs(j) = sign(x(j));
  s.residual_signs = Vec::Zero(inst.m());
  for (Index i : s.primal_active) s.residual_signs(i) = sign(r(i));
  s.dual_signs = Vec::Zero(inst.m());
  for (Index i : s.dual_support) s.dual_signs(i) = sign(y(i));
  return s;
}

}  // namespace houdini
