#include "bimanual/refine_solver.h"

#include <random>

#include <gtest/gtest.h>

#include "bimanual/init_solver.h"
#include "bimanual/synth.h"
#include "test_util.h"

namespace bimanual {
namespace {

using testing::RandomUnit;

SyntheticScene Scene(uint64_t seed, double sigma, int views = 6) {
  SceneConfig config;
  config.views_per_arm = {views, views};
  config.noise.rot_sigma = sigma;
  config.noise.trans_sigma = sigma;
  config.point_maps = false;
  return Generate(config, seed);
}

// Mean over pairs of angle(A X, X B) for one arm, from lie primitives.
double MeanRotationDiscrepancy(const CaptureSet& cs, const RigidTransform& x,
                               double lambda) {
  const auto a = RelativeEe(cs);
  const auto b = RelativeCam(cs, lambda);
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    sum += GeodesicDistance((a[i] * x).rotation(), (x * b[i]).rotation());
  }
  return sum / static_cast<double>(a.size());
}

double MeanTranslationDiscrepancy(const CaptureSet& cs,
                                  const RigidTransform& x, double lambda) {
  const auto a = RelativeEe(cs);
  const auto b = RelativeCam(cs, lambda);
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    sum += ((a[i] * x).translation() - (x * b[i]).translation()).norm();
  }
  return sum / static_cast<double>(a.size());
}

TEST(ParametersTest, PackUnpackRoundTrip) {
  std::mt19937_64 rng(1);
  const RigidTransform x1 = testing::RandomTransform(rng);
  const RigidTransform x2 = testing::RandomTransform(rng);
  RigidTransform y1, y2;
  double lambda = 0.0;
  UnpackParameters(PackParameters(x1, x2, 0.37), &y1, &y2, &lambda);
  EXPECT_LT((y1.Matrix() - x1.Matrix()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((y2.Matrix() - x2.Matrix()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(lambda, 0.37, 1e-15);
}

TEST(CostTest, ZeroAtGroundTruthWithoutNoise) {
  const SyntheticScene s = Scene(2, 0.0);
  EXPECT_LT(Cost(s.Problem(), s.truth_lambda, s.truth_extrinsic_1,
                 s.truth_extrinsic_2, 0.5),
            1e-12);
}

TEST(CostTest, RotationOnlyCostMatchesDiscrepancyOracle) {
  const SyntheticScene s = Scene(3, 0.0);
  const CalibrationProblem p = s.Problem();
  std::mt19937_64 rng(3);
  const RigidTransform x1(
      s.truth_extrinsic_1.rotation() * ExpMapSO3(0.1 * RandomUnit(rng)),
      s.truth_extrinsic_1.translation());
  const double cost = Cost(p, s.truth_lambda, x1, s.truth_extrinsic_2, 1.0);
  EXPECT_GT(cost, 0.0);
  EXPECT_NEAR(cost, MeanRotationDiscrepancy(p.primary, x1, s.truth_lambda),
              1e-12);
}

TEST(CostTest, BlendMatchesOracleOnNoisyData) {
  const SyntheticScene s = Scene(4, 0.02);
  const CalibrationProblem p = s.Problem();
  const double alpha = 0.3;
  double oracle = 0.0;
  for (int a = 0; a < 2; ++a) {
    const RigidTransform& x =
        a == 0 ? s.truth_extrinsic_1 : s.truth_extrinsic_2;
    oracle += alpha * MeanRotationDiscrepancy(p.arm(a), x, s.truth_lambda) +
              (1 - alpha) *
                  MeanTranslationDiscrepancy(p.arm(a), x, s.truth_lambda);
  }
  EXPECT_NEAR(Cost(p, s.truth_lambda, s.truth_extrinsic_1, s.truth_extrinsic_2,
                   alpha),
              oracle, 1e-12);
}

TEST(CostTest, TranslationOnlyCostIgnoresRotationThatKeepsTranslations) {
  // With alpha = 0 only translation parts count. When no camera translates,
  // neither side's translation depends on the rotation of X.
  const SyntheticScene s = Scene(5, 0.0);
  CalibrationProblem p = s.Problem();
  for (CaptureSet* cs : {&p.primary, &p.secondary}) {
    for (RigidTransform& pose : cs->cam_poses) {
      pose = RigidTransform(pose.rotation(), Eigen::Vector3d::Zero());
    }
  }
  const RigidTransform x1 = s.truth_extrinsic_1;
  const RigidTransform rotated(x1.rotation() * ExpMapSO3({0.3, -0.2, 0.1}),
                               x1.translation());
  EXPECT_EQ(Cost(p, s.truth_lambda, x1, s.truth_extrinsic_2, 0.0),
            Cost(p, s.truth_lambda, rotated, s.truth_extrinsic_2, 0.0));
}

TEST(GradientTest, MatchesCentralDifferences) {
  const SyntheticScene s = Scene(6, 0.02);
  const CalibrationProblem p = s.Problem();
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0.0, 0.05);
  const ParameterVector center =
      PackParameters(s.truth_extrinsic_1, s.truth_extrinsic_2, s.truth_lambda);
  for (int trial = 0; trial < 10; ++trial) {
    ParameterVector x = center;
    for (int k = 0; k < kNumParameters; ++k) x(k) += n(rng);
    const ParameterVector g = Gradient(p, x, 0.5);
    for (int k = 0; k < kNumParameters; ++k) {
      const double h = 1e-6;
      ParameterVector plus = x, minus = x;
      plus(k) += h;
      minus(k) -= h;
      const double fd = (Cost(p, plus, 0.5) - Cost(p, minus, 0.5)) / (2 * h);
      EXPECT_LE(std::abs(g(k) - fd),
                1e-4 * std::max(std::abs(g(k)), std::abs(fd)) + 1e-9)
          << "coordinate " << k << " analytic " << g(k) << " fd " << fd;
    }
  }
}

TEST(GradientTest, ScaleComponentVanishesForRotationOnlyCost) {
  const SyntheticScene s = Scene(7, 0.02);
  const ParameterVector x =
      PackParameters(s.truth_extrinsic_1, s.truth_extrinsic_2, 0.8);
  EXPECT_EQ(Gradient(s.Problem(), x, 1.0)(12), 0.0);
}

TEST(GradientTest, ZeroAtGroundTruthWithoutNoise) {
  const SyntheticScene s = Scene(8, 0.0);
  const ParameterVector x =
      PackParameters(s.truth_extrinsic_1, s.truth_extrinsic_2, s.truth_lambda);
  EXPECT_LT(Gradient(s.Problem(), x, 0.5).norm(), 1e-9);
}

TEST(RefineTest, OptimalStartStopsImmediately) {
  const SyntheticScene s = Scene(9, 0.0);
  const CalibrationProblem p = s.Problem();
  const InitialSolution init = SolveInitial(p);
  const RefinedSolution r = Refine(p, init, SolverOptions());
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations_used, 5);
  EXPECT_LT((r.extrinsic_1.Matrix() - init.extrinsic_1.Matrix())
                .cwiseAbs()
                .maxCoeff(),
            1e-9);
  EXPECT_NEAR(r.lambda, init.lambda, 1e-9);
}

TEST(RefineTest, CostTraceIsNonIncreasing) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const SyntheticScene s = Scene(seed, 0.01, 4);
    const CalibrationProblem p = s.Problem();
    const RefinedSolution r = Refine(p, SolveInitial(p), SolverOptions());
    ASSERT_FALSE(r.cost_trace.empty());
    EXPECT_EQ(r.cost_trace.front().iteration, 0);
    for (size_t i = 1; i < r.cost_trace.size(); ++i) {
      EXPECT_LE(r.cost_trace[i].cost, r.cost_trace[i - 1].cost);
    }
    EXPECT_NEAR(r.cost_trace.back().cost,
                Cost(p, r.lambda, r.extrinsic_1, r.extrinsic_2, 0.5), 1e-12);
  }
}

TEST(RefineTest, RecoversFromPerturbedStartWithoutNoise) {
  const SyntheticScene s = Scene(10, 0.0, 8);
  const CalibrationProblem p = s.Problem();
  InitialSolution init;
  init.extrinsic_1 = RigidTransform(
      s.truth_extrinsic_1.rotation() * ExpMapSO3({0.02, -0.01, 0.015}),
      s.truth_extrinsic_1.translation() + Eigen::Vector3d(0.01, 0.0, -0.01));
  init.extrinsic_2 = s.truth_extrinsic_2;
  init.lambda = s.truth_lambda * 1.02;
  SolverOptions opts;
  opts.gd_max_iters = 20000;
  const RefinedSolution r = Refine(p, init, opts);
  EXPECT_LT(r.cost_trace.back().cost, 1e-3 * r.cost_trace.front().cost);
  EXPECT_LT(testing::RotationError(r.extrinsic_1, s.truth_extrinsic_1), 1e-3);
  EXPECT_NEAR(r.lambda / s.truth_lambda, 1.0, 1e-3);
}

TEST(RefineTest, IterationLimitIsReported) {
  const SyntheticScene s = Scene(11, 0.02);
  const CalibrationProblem p = s.Problem();
  SolverOptions opts;
  opts.gd_max_iters = 3;
  const RefinedSolution r = Refine(p, SolveInitial(p), opts);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations_used, 3);
  EXPECT_EQ(r.stop_reason, "iteration limit reached");
}

}  // namespace
}  // namespace bimanual
