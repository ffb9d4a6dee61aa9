#include "houdini/asm_lp.hpp"
#include "houdini/oracle.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace houdini;

namespace {

StandardLp scalar_lp(double c) {
  StandardLp lp;
  lp.c = Vec::Constant(1, c);
  lp.a_eq = DenseMatrix(0, 1);
  lp.b_eq = Vec(0);
  lp.d = DenseMatrix(0, 1);
  lp.e = Vec(0);
  lp.sigma = Vec::Ones(1);
  return lp;
}

// min −t s.t. t ≤ 1, written as −t ≥ −1.
StandardLp capped_lp() {
  StandardLp lp = scalar_lp(-1.0);
  lp.d = DenseMatrix::Constant(1, 1, -1.0);
  lp.e = Vec::Constant(1, -1.0);
  return lp;
}

GeneralLp to_general(const StandardLp& lp) {
  const Index n = lp.num_vars();
  GeneralLp g = GeneralLp::with_vars(n);
  g.cost = lp.c;
  for (Index j = 0; j < n; ++j) {
    g.lower(j) = lp.sigma(j) > 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    g.upper(j) = lp.sigma(j) > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  for (Index i = 0; i < lp.num_eq(); ++i) g.add_eq(lp.a_eq.row(i).transpose(), lp.b_eq(i));
  for (Index i = 0; i < lp.num_ineq(); ++i) g.add_ineq(-lp.d.row(i).transpose(), -lp.e(i));
  return g;
}

// Random bounded LP with a known feasible point: σ-signed variables boxed by
// σⱼxⱼ ≤ 10, a few equality rows and a few random inequality rows.
struct RandomLp {
  StandardLp lp;
  Vec x0;
};

RandomLp random_lp(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Index n = 2 + Index(rng() % 4);
  const Index m = Index(rng() % std::min<Index>(n, 3));
  const Index kr = Index(rng() % 4);
  RandomLp r;
  StandardLp& lp = r.lp;
  lp.sigma.resize(n);
  r.x0.resize(n);
  for (Index j = 0; j < n; ++j) {
    lp.sigma(j) = u(rng) < 0.5 ? 1.0 : -1.0;
    r.x0(j) = u(rng) < 0.3 ? 0.0 : lp.sigma(j) * (0.5 + 4.0 * u(rng));
  }
  lp.c.resize(n);
  for (Index j = 0; j < n; ++j) lp.c(j) = g(rng);
  lp.a_eq.resize(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) lp.a_eq(i, j) = g(rng);
  lp.b_eq = lp.a_eq * r.x0;
  lp.d = DenseMatrix::Zero(kr + n, n);
  lp.e.resize(kr + n);
  for (Index i = 0; i < kr; ++i) {
    for (Index j = 0; j < n; ++j) lp.d(i, j) = g(rng);
    lp.e(i) = lp.d.row(i).dot(r.x0) - (u(rng) < 0.3 ? 0.0 : u(rng));
  }
  for (Index j = 0; j < n; ++j) {
    lp.d(kr + j, j) = -lp.sigma(j);
    lp.e(kr + j) = -10.0;
  }
  return r;
}

}  // namespace

TEST(KktCheck, ScalarEqualityStationary) {
  StandardLp lp = scalar_lp(1.0);
  lp.a_eq = DenseMatrix::Ones(1, 1);
  lp.b_eq = Vec::Ones(1);
  EXPECT_TRUE(kkt_check(lp, Vec::Ones(1), Vec::Ones(1), Vec(0), Vec::Zero(1), 1e-12));
  EXPECT_FALSE(kkt_check(lp, Vec::Ones(1), Vec::Zero(1), Vec(0), Vec::Zero(1), 1e-12));
}

TEST(KktCheck, OracleMultipliersCertifyRandomLps) {
  std::mt19937_64 rng(7);
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const RandomLp r = random_lp(rng);
    const LpSolution sol = simplex_solve(to_general(r.lp));
    ASSERT_EQ(sol.status, LpStatus::kOptimal);
    const Vec lambda = sol.dual_eq;
    const Vec mu = -sol.dual_ineq;
    const Vec rest = r.lp.c - r.lp.a_eq.transpose() * lambda - r.lp.d.transpose() * mu;
    const Vec nu = r.lp.sigma.cwiseProduct(rest);
    EXPECT_TRUE(kkt_check(r.lp, sol.x, lambda, mu, nu, 1e-7)) << "trial " << trial;
    ++checked;
  }
  EXPECT_EQ(checked, 30);
}

TEST(FindDirection, ScalarConsistent) {
  const StandardLp lp = capped_lp();
  AsmState s = make_state(lp, Vec::Constant(1, 0.5));
  ASSERT_TRUE(s.active.empty());
  const SolveReport r = find_direction(lp, s);
  ASSERT_TRUE(r.consistent);
  EXPECT_NEAR(r.solution(0), 1.0, 1e-12);
}

TEST(FindDirection, ActiveRowMakesSystemInconsistent) {
  const StandardLp lp = capped_lp();
  const AsmState s = make_state(lp, Vec::Ones(1));
  ASSERT_EQ(s.active, IndexSet(1, {0}));
  EXPECT_FALSE(find_direction(lp, s).consistent);
}

TEST(FindDirection, RandomDirectionsSatisfyTheSystem) {
  std::mt19937_64 rng(11);
  int consistent = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const RandomLp r = random_lp(rng);
    const AsmState s = make_state(r.lp, r.x0);
    const SolveReport d = find_direction(r.lp, s);
    if (!d.consistent) continue;
    ++consistent;
    const Vec& xi = d.solution;
    EXPECT_NEAR(r.lp.c.dot(xi), -1.0, 1e-8);
    EXPECT_LT(norm_inf(r.lp.a_eq * xi), 1e-8 * (1 + norm_inf(xi)));
    for (Index i : s.active) EXPECT_NEAR(r.lp.d.row(i).dot(xi), 0.0, 1e-8 * (1 + norm_inf(xi)));
    for (Index j : s.support.complement()) EXPECT_EQ(xi(j), 0.0);
  }
  EXPECT_GT(consistent, 10);
}

TEST(StepSize, SupportHitsZero) {
  const StandardLp lp = scalar_lp(1.0);
  const AsmState s = make_state(lp, Vec::Ones(1));
  const StepResult st = step_size(lp, s, Vec::Constant(1, -1.0));
  EXPECT_DOUBLE_EQ(st.alpha, 1.0);
  EXPECT_EQ(st.leaving_support, IndexSet(1, {0}));
  EXPECT_TRUE(st.new_active.empty());
}

TEST(StepSize, InequalityBlocks) {
  StandardLp lp = scalar_lp(-1.0);
  lp.d = DenseMatrix::Constant(1, 1, -1.0);
  lp.e = Vec::Constant(1, -2.0);
  const AsmState s = make_state(lp, Vec::Constant(1, 0.5));
  const StepResult st = step_size(lp, s, Vec::Ones(1));
  EXPECT_DOUBLE_EQ(st.alpha, 1.5);
  EXPECT_EQ(st.new_active, IndexSet(1, {0}));
}

TEST(StepSize, NonBlockingRowIgnored) {
  StandardLp lp = scalar_lp(-1.0);
  lp.d = DenseMatrix::Constant(1, 1, 1.0);
  lp.e = Vec::Constant(1, 0.0);
  const AsmState s = make_state(lp, Vec::Constant(1, 0.5));
  EXPECT_THROW(step_size(lp, s, Vec::Ones(1)), SolverError);
}

TEST(StepSize, TiesReturnAllBlockingRows) {
  // x ≥ 0 in ℝ², rows x₁ ≤ 1 and x₂ ≤ 1, moving along (1, 1).
  StandardLp lp;
  lp.c = Vec::Constant(2, -1.0);
  lp.a_eq = DenseMatrix(0, 2);
  lp.b_eq = Vec(0);
  lp.d = -DenseMatrix::Identity(2, 2);
  lp.e = Vec::Constant(2, -1.0);
  lp.sigma = Vec::Ones(2);
  const AsmState s = make_state(lp, Vec::Constant(2, 0.25));
  const StepResult st = step_size(lp, s, Vec::Ones(2));
  EXPECT_DOUBLE_EQ(st.alpha, 0.75);
  EXPECT_EQ(st.new_active, IndexSet(2, {0, 1}));
}

TEST(Multipliers, ZeroVariableAtLowerBound) {
  const StandardLp lp = scalar_lp(1.0);
  const AsmState s = make_state(lp, Vec::Zero(1));
  const Multipliers m = multipliers(lp, s);
  ASSERT_EQ(m.nu_inactive.size(), 1);
  EXPECT_DOUBLE_EQ(m.nu_inactive(0), 1.0);
  EXPECT_TRUE(m.optimal(1e-12));
}

TEST(Multipliers, ActiveCap) {
  const StandardLp lp = capped_lp();
  const AsmState s = make_state(lp, Vec::Ones(1));
  const Multipliers m = multipliers(lp, s);
  ASSERT_EQ(m.mu_active.size(), 1);
  EXPECT_NEAR(m.mu_active(0), 1.0, 1e-12);
  EXPECT_TRUE(m.optimal(1e-12));
}

TEST(AsmSolve, ObjectiveParallelToConstraint) {
  StandardLp lp;
  lp.c = Vec::Ones(2);
  lp.a_eq = DenseMatrix(0, 2);
  lp.b_eq = Vec(0);
  lp.d = DenseMatrix::Ones(1, 2);
  lp.e = Vec::Ones(1);
  lp.sigma = Vec::Ones(2);
  Vec x0(2);
  x0 << 1, 0;
  const AsmResult r = asm_solve(lp, x0);
  EXPECT_NEAR(r.objective, 1.0, 1e-12);
  EXPECT_NEAR(r.multipliers.full_mu()(0), 1.0, 1e-12);
}

TEST(AsmSolve, InfeasibleStartRejected) {
  const StandardLp lp = capped_lp();
  try {
    asm_solve(lp, Vec::Constant(1, 2.0));
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), SolverErrorKind::kInfeasibleStart);
  }
}

TEST(AsmSolve, UnboundedReported) {
  const StandardLp lp = scalar_lp(-1.0);
  try {
    asm_solve(lp, Vec::Zero(1));
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), SolverErrorKind::kUnboundedStep);
  }
}

TEST(AsmSolve, IterationCapReported) {
  std::mt19937_64 rng(5);
  const RandomLp r = random_lp(rng);
  AsmOptions o;
  o.max_iterations = 1;
  bool capped = false;
  try {
    asm_solve(r.lp, r.x0, {}, o);
  } catch (const SolverError& e) {
    capped = e.kind() == SolverErrorKind::kIterationLimit;
  }
  EXPECT_TRUE(capped);
}

TEST(AsmSolve, MatchesSimplexOnRandomLps) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const RandomLp r = random_lp(rng);
    const LpSolution ref = simplex_solve(to_general(r.lp));
    ASSERT_EQ(ref.status, LpStatus::kOptimal);
    for (bool fix : {true, false}) {
      AsmOptions o;
      o.fix_new_support_variable = fix;
      Index rounds = 0;
      o.debug_hook = [&](const StandardLp&, const AsmState&) { ++rounds; };
      const AsmResult res = asm_solve(r.lp, r.x0, {}, o);
      EXPECT_NEAR(res.objective, ref.value, 1e-7 * (1 + std::abs(ref.value))) << "trial " << trial;
      EXPECT_TRUE(is_feasible(r.lp, res.x, 1e-8));
      EXPECT_GT(rounds, 0);
    }
  }
}

TEST(AsmSolve, MultiplierRoundsRelaxOneIndex) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const RandomLp r = random_lp(rng);
    std::optional<AsmState> prev;
    bool ok = true;
    AsmOptions o;
    o.trace = [](const AsmTraceEntry&) {};
    o.debug_hook = [&](const StandardLp&, const AsmState& s) {
      if (prev && s.x == prev->x) {
        // No movement: the iteration was a multiplier round.
        const Index changes = s.active.minus(prev->active).size() +
                              prev->active.minus(s.active).size() +
                              s.support.minus(prev->support).size() +
                              prev->support.minus(s.support).size();
        if (changes > 1) ok = false;
      }
      prev = s;
    };
    asm_solve(r.lp, r.x0, {}, o);
    EXPECT_TRUE(ok) << "trial " << trial;
  }
}

TEST(RelaxationLedger, ZeroStepShrinksLedger) {
  RelaxationLedger l(3, 3);
  l.removed_active.insert(1);
  l.added_support.insert(2);
  IndexSet active(3), support(3);
  StepResult st;
  st.new_active = IndexSet(3, {1});
  st.leaving_support = IndexSet(3);
  l.after_step(0.0, st, active, support, [](Index) { return true; }, [](Index) { return true; });
  EXPECT_TRUE(l.removed_active.empty());
  EXPECT_EQ(l.added_support, IndexSet(3, {2}));
}

TEST(RelaxationLedger, PositiveStepRestoresAndClears) {
  RelaxationLedger l(3, 3);
  l.removed_active.insert(0);
  l.added_support.insert(2);
  IndexSet active(3), support(3, {2});
  StepResult st;
  st.new_active = IndexSet(3);
  st.leaving_support = IndexSet(3);
  l.after_step(0.5, st, active, support, [](Index) { return true; }, [](Index) { return true; });
  EXPECT_EQ(active, IndexSet(3, {0}));
  EXPECT_TRUE(support.empty());
  EXPECT_EQ(l.size(), 0);
}

TEST(StandardLp, ValidateRejectsBadSigma) {
  StandardLp lp = scalar_lp(1.0);
  lp.sigma(0) = 0.0;
  EXPECT_THROW(lp.validate(), LinalgError);
}
