#include "houdini/homotopy.hpp"
#include "houdini/instances.hpp"
#include "houdini/oracle.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace houdini;
using houdini::testing::mat_vec;

TEST(MakeGroundTruth, ScalarInstance) {
  const GroundTruthInstance g =
      make_ground_truth(DenseMatrix::Ones(1, 1), Vec::Ones(1), Vec::Constant(1, -1.0), 0.5);
  EXPECT_DOUBLE_EQ(g.inst.b(0), 1.5);
  EXPECT_TRUE(check_optimal_pair(g.inst, Vec::Ones(1), Vec::Constant(1, -1.0), 0.5, 1e-12));
  EXPECT_NEAR(reference_objective(g.inst), 1.0, 1e-12);
}

TEST(MakeGroundTruth, ZeroCertificateRejectedUnlessZeroSolution) {
  EXPECT_THROW(make_ground_truth(DenseMatrix::Ones(1, 1), Vec::Ones(1), Vec::Zero(1), 0.5),
               SolverError);
  const GroundTruthInstance g =
      make_ground_truth(DenseMatrix::Ones(1, 1), Vec::Zero(1), Vec::Zero(1), 0.5);
  EXPECT_DOUBLE_EQ(g.inst.b(0), 0.0);
}

TEST(MakeGroundTruth, BadCertificateRejected) {
  EXPECT_THROW(make_ground_truth(DenseMatrix::Ones(1, 1), Vec::Ones(1), Vec::Ones(1), 0.5),
               SolverError);
}

TEST(MakeGroundTruth, HomotopyRecoversPlantedObjective) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const BpPair bp = random_bp_pair(10, 20, 3, 10.0, seed);
    const Vec y = certificate_l1(bp.a, bp.x_bar);
    const GroundTruthInstance g = make_ground_truth(bp.a, bp.x_bar, y, 0.3);
    const SolutionPath p = solve_path(g.inst);
    ASSERT_TRUE(p.ok()) << p.message;
    EXPECT_NEAR(norm_1(p.final_breakpoint().x), norm_1(bp.x_bar), 1e-7 * norm_1(bp.x_bar));
  }
}

TEST(RandomBpPair, Deterministic) {
  const BpPair a = random_bp_pair(8, 16, 2, 100.0, 42);
  const BpPair b = random_bp_pair(8, 16, 2, 100.0, 42);
  EXPECT_EQ(a.a, b.a);
  EXPECT_EQ(a.x_bar, b.x_bar);
  EXPECT_NE(random_bp_pair(8, 16, 2, 100.0, 43).a, a.a);
}

TEST(RandomBpPair, ZeroSparsity) {
  EXPECT_EQ(random_bp_pair(5, 10, 0, 10.0, 1).x_bar, Vec::Zero(10));
}

TEST(RandomBpPair, AcceptedDrawsAreBasisPursuitOptimal) {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const BpPair bp = random_bp_pair(10, 20, 3, 100.0, seed);
    EXPECT_EQ((bp.x_bar.array() != 0.0).count(), 3);
    for (Index j = 0; j < 20; ++j) EXPECT_NEAR(bp.a.col(j).norm(), 1.0, 1e-12);
    EXPECT_NEAR(basis_pursuit_value(bp.a, bp.a * bp.x_bar), norm_1(bp.x_bar),
                1e-8 * norm_1(bp.x_bar));
  }
}

TEST(RandomBpPair, InvalidArguments) {
  EXPECT_THROW(random_bp_pair(4, 8, 9, 10.0, 1), SolverError);
  EXPECT_THROW(random_bp_pair(4, 8, 2, 0.5, 1), LinalgError);
}

TEST(Certificates, BothRegimesValid) {
  const BpPair bp = random_bp_pair(12, 24, 3, 10.0, 5);
  for (CertificateRegime r : {CertificateRegime::kSparse, CertificateRegime::kDense}) {
    const Vec y = make_certificate(bp.a, bp.x_bar, r);
    const Vec aty = -bp.a.transpose() * y;
    for (Index j = 0; j < 24; ++j) {
      if (bp.x_bar(j) != 0.0)
        EXPECT_NEAR(aty(j), sign(bp.x_bar(j)), 1e-9) << to_string(r);
      else
        EXPECT_LE(std::abs(aty(j)), 1.0 + 1e-9) << to_string(r);
    }
  }
  const Vec sparse = make_certificate(bp.a, bp.x_bar, CertificateRegime::kSparse);
  const Vec dense = make_certificate(bp.a, bp.x_bar, CertificateRegime::kDense);
  EXPECT_GT((dense.array().abs() > 1e-9).count(), (sparse.array().abs() > 1e-9).count());
}

TEST(GenerateGroundTruth, Deterministic) {
  const GroundTruthInstance a = generate_ground_truth(10, 20, 3, 0.5, 100.0, 42);
  const GroundTruthInstance b = generate_ground_truth(10, 20, 3, 0.5, 100.0, 42);
  EXPECT_EQ(a.inst.a, b.inst.a);
  EXPECT_EQ(a.inst.b, b.inst.b);
  EXPECT_EQ(a.x_bar, b.x_bar);
}

TEST(ToLinfForm, ScalarBox) {
  GeneralizedBounds gb{DenseMatrix::Ones(1, 1), Vec::Zero(1), Vec::Constant(1, -1.0),
                       Vec::Constant(1, 3.0)};
  const LinfForm f = to_linf_form(gb, 1.0);
  EXPECT_DOUBLE_EQ(f.g(0), 0.5);
  EXPECT_DOUBLE_EQ(f.ga(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(f.gb(0), 0.5);
  for (double x : {-1.5, -1.0, 0.0, 3.0, 3.5})
    EXPECT_EQ(satisfies_linf(f, Vec::Constant(1, x)), x >= -1.0 && x <= 3.0) << x;
}

TEST(ToLinfForm, SymmetricBoundsUnchanged) {
  DenseMatrix a(2, 2);
  a << 1, 2, 3, 4;
  GeneralizedBounds gb{a, mat_vec({1, -1}), mat_vec({-2, -2}), mat_vec({2, 2})};
  const LinfForm f = to_linf_form(gb, 2.0);
  EXPECT_EQ(f.g, Vec::Ones(2));
  EXPECT_EQ(f.ga, a);
  EXPECT_EQ(f.gb, gb.b);
}

TEST(ToLinfForm, MembershipAgreesOnRandomBoxes) {
  std::mt19937_64 rng(71);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    GeneralizedBounds gb;
    gb.a.resize(4, 3);
    for (Index i = 0; i < gb.a.size(); ++i) gb.a.data()[i] = g(rng);
    gb.b.resize(4);
    gb.alpha.resize(4);
    gb.beta.resize(4);
    for (Index i = 0; i < 4; ++i) {
      gb.b(i) = g(rng);
      gb.alpha(i) = g(rng);
      gb.beta(i) = gb.alpha(i) + u(rng);
    }
    const LinfForm f = to_linf_form(gb, 0.7);
    for (int s = 0; s < 100; ++s) {
      Vec x(3);
      for (Index j = 0; j < 3; ++j) x(j) = 2.0 * g(rng);
      EXPECT_EQ(satisfies_bounds(gb, x), satisfies_linf(f, x));
    }
  }
}

TEST(ToLinfForm, RejectsEmptyBoxes) {
  GeneralizedBounds gb{DenseMatrix::Ones(1, 1), Vec::Zero(1), Vec::Constant(1, 1.0),
                       Vec::Constant(1, 1.0)};
  EXPECT_THROW(to_linf_form(gb, 1.0), LinalgError);
  gb.beta(0) = 2.0;
  EXPECT_THROW(to_linf_form(gb, 0.0), LinalgError);
}

TEST(InstanceJson, RoundTrip) {
  const GroundTruthInstance g = generate_ground_truth(5, 8, 2, 0.25, 10.0, 3);
  std::stringstream ss;
  write_instance_json(ss, g);
  const GroundTruthInstance r = read_instance_json(ss);
  EXPECT_EQ(r.inst.a, g.inst.a);
  EXPECT_EQ(r.inst.b, g.inst.b);
  EXPECT_EQ(r.inst.delta, g.inst.delta);
  EXPECT_EQ(r.x_bar, g.x_bar);
  EXPECT_EQ(r.seed, g.seed);
}

TEST(InstanceJson, MatrixMarketField) {
  std::istringstream in(R"({"A": "%%MatrixMarket matrix array real general\n1 2\n1\n2\n",
                            "b": [3], "delta": 0.5})");
  const GroundTruthInstance g = read_instance_json(in);
  ASSERT_EQ(g.inst.a.cols(), 2);
  EXPECT_EQ(g.inst.a(0, 1), 2.0);
}

TEST(InstanceJson, Malformed) {
  std::istringstream missing(R"({"A": [[1]], "b": [1]})");
  EXPECT_THROW(read_instance_json(missing), LinalgError);
  std::istringstream ragged(R"({"A": [[1, 2], [3]], "b": [1, 2], "delta": 0})");
  EXPECT_THROW(read_instance_json(ragged), LinalgError);
  std::istringstream garbage("{not json");
  EXPECT_THROW(read_instance_json(garbage), LinalgError);
}
