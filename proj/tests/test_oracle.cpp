#include "houdini/oracle.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace houdini;
using houdini::testing::mat_vec;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GeneralLp one_var(double cost) {
  GeneralLp lp = GeneralLp::with_vars(1);
  lp.cost(0) = cost;
  lp.lower(0) = -kInf;
  return lp;
}

}  // namespace

TEST(Reformulate, ScalarInstance) {
  const ProblemInstance inst{DenseMatrix::Ones(1, 1), Vec::Constant(1, 2.0), 1.0};
  const GeneralLp lp = reformulate(inst);
  EXPECT_EQ(lp.num_vars(), 4);
  EXPECT_EQ(lp.eq_matrix.rows(), 2);
  const LpSolution s = simplex_solve(lp);
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_NEAR(s.x(0), 1.0, 1e-12);
  EXPECT_NEAR(s.x(1), 0.0, 1e-12);
  EXPECT_NEAR(recover_x(s.x, 1)(0), 1.0, 1e-12);
}

TEST(Reformulate, ZeroIsOptimalAtStartLevel) {
  const ProblemInstance inst{DenseMatrix::Identity(2, 2), mat_vec({3, -0.5}), 3.0};
  EXPECT_NEAR(reference_objective(inst), 0.0, 1e-12);
}

TEST(SimplexSolve, LowerBoundedVariable) {
  GeneralLp lp = one_var(1.0);
  lp.add_ineq(Vec::Constant(1, -1.0), -1.0);
  const LpSolution s = simplex_solve(lp);
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_NEAR(s.x(0), 1.0, 1e-12);
  EXPECT_NEAR(s.value, 1.0, 1e-12);
  EXPECT_NEAR(s.dual_value, 1.0, 1e-12);
}

TEST(SimplexSolve, SoftThresholdValue) {
  const ProblemInstance inst{DenseMatrix::Identity(2, 2), mat_vec({3, -0.5}), 0.5};
  EXPECT_NEAR(reference_objective(inst), 2.5, 1e-12);
}

TEST(SimplexSolve, RedundantDegenerateRows) {
  // Three copies of x₁ + x₂ = 1 and a degenerate vertex at the origin.
  GeneralLp lp = GeneralLp::with_vars(3);
  lp.cost = mat_vec({-1, -1, 0});
  for (int r = 0; r < 3; ++r) lp.add_eq(mat_vec({1, 1, 0}), 1.0);
  lp.add_ineq(mat_vec({1, 0, -1}), 0.0);
  lp.add_ineq(mat_vec({0, 1, -1}), 0.0);
  lp.add_ineq(mat_vec({1, -1, 0}), 0.0);
  const LpSolution s = simplex_solve(lp);
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_NEAR(s.value, -1.0, 1e-12);
}

TEST(SimplexSolve, UnboundedAndInfeasible) {
  EXPECT_EQ(simplex_solve(one_var(-1.0)).status, LpStatus::kUnbounded);
  GeneralLp lp = GeneralLp::with_vars(1);
  lp.add_ineq(Vec::Constant(1, 1.0), -1.0);
  EXPECT_EQ(simplex_solve(lp).status, LpStatus::kInfeasible);
}

TEST(SimplexSolve, StrongDualityOnRandomLps) {
  std::mt19937_64 rng(61);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 40; ++trial) {
    GeneralLp lp = GeneralLp::with_vars(5);
    for (Index j = 0; j < 5; ++j) {
      lp.cost(j) = g(rng);
      lp.upper(j) = 3.0;
      lp.lower(j) = -2.0;
    }
    Vec row(5);
    for (int r = 0; r < 3; ++r) {
      for (Index j = 0; j < 5; ++j) row(j) = g(rng);
      lp.add_ineq(row, 1.0);
    }
    for (Index j = 0; j < 5; ++j) row(j) = g(rng);
    lp.add_eq(row, 0.5);
    const LpSolution s = simplex_solve(lp);
    if (s.status != LpStatus::kOptimal) continue;
    EXPECT_NEAR(s.value, s.dual_value, 1e-8 * (1 + std::abs(s.value)));
    EXPECT_LE(s.dual_ineq.maxCoeff(), 1e-9);
  }
}

TEST(Feasibility, SimpleCases) {
  GeneralLp contradictory = one_var(0.0);
  contradictory.add_ineq(Vec::Constant(1, -1.0), -1.0);
  contradictory.add_ineq(Vec::Constant(1, 1.0), 0.0);
  EXPECT_FALSE(feasibility(contradictory));
  EXPECT_TRUE(feasibility(one_var(0.0)));
}

TEST(StrictlyFeasible, OpenHalfLine) {
  GeneralLp lp = GeneralLp::with_vars(1);  // x ≥ 0
  EXPECT_FALSE(strictly_feasible(lp, Vec::Ones(1), 0.0));  // x < 0
  EXPECT_TRUE(strictly_feasible(lp, -Vec::Ones(1), 0.0));  // −x < 0
}

TEST(CertificateL1, ScalarAndSeparable) {
  const Vec y1 = certificate_l1(DenseMatrix::Ones(1, 1), Vec::Ones(1));
  EXPECT_NEAR(y1(0), -1.0, 1e-12);
  const Vec y2 = certificate_l1(DenseMatrix::Identity(2, 2), mat_vec({1, 0}));
  EXPECT_NEAR((y2 - mat_vec({-1, 0})).norm(), 0.0, 1e-12);
}

TEST(CertificateL1, VerifiedBySubstitution) {
  std::mt19937_64 rng(67);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    DenseMatrix a(10, 20);
    for (Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
    Vec x = Vec::Zero(20);
    x(Index(rng() % 20)) = 1.5;
    const Vec y = certificate_l1(a, x);
    const Vec aty = -a.transpose() * y;
    for (Index j = 0; j < 20; ++j) {
      if (x(j) != 0.0)
        EXPECT_NEAR(aty(j), sign(x(j)), 1e-9);
      else
        EXPECT_LE(std::abs(aty(j)), 1.0 + 1e-9);
    }
  }
}

TEST(CertificateL1, InfeasibleThrows) {
  // Two identical columns with opposite signs in x̄ cannot share a certificate.
  DenseMatrix a(1, 2);
  a << 1, 1;
  EXPECT_THROW(certificate_l1(a, mat_vec({1, -1})), SolverError);
}

TEST(BasisPursuit, IdentityValue) {
  EXPECT_NEAR(basis_pursuit_value(DenseMatrix::Identity(3, 3), mat_vec({1, -2, 0.5})), 3.5,
              1e-12);
}

TEST(GeneralLp, ValidateCatchesShapes) {
  GeneralLp lp = GeneralLp::with_vars(2);
  lp.eq_matrix = DenseMatrix::Ones(1, 3);
  lp.eq_rhs = Vec::Ones(1);
  EXPECT_THROW(lp.validate(), LinalgError);
}
