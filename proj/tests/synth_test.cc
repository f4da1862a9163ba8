#include "bimanual/synth.h"

#include <fstream>

#include <gtest/gtest.h>

#include "bimanual/error.h"
#include "bimanual/init_solver.h"
#include "test_util.h"

namespace bimanual {
namespace {

SceneConfig Noisy() {
  SceneConfig config;
  config.noise.rot_sigma = 0.01;
  config.noise.trans_sigma = 0.01;
  config.noise.point_sigma = 0.002;
  return config;
}

TEST(GenerateTest, SameSeedGivesIdenticalScene) {
  const SyntheticScene a = Generate(Noisy(), 42);
  const SyntheticScene b = Generate(Noisy(), 42);
  EXPECT_EQ(a.truth_lambda, b.truth_lambda);
  EXPECT_EQ(a.truth_extrinsic_1.Matrix(), b.truth_extrinsic_1.Matrix());
  EXPECT_EQ(a.truth_world_to_base_2.Matrix(), b.truth_world_to_base_2.Matrix());
  for (int arm = 0; arm < 2; ++arm) {
    ASSERT_EQ(a.observed[arm].size(), b.observed[arm].size());
    for (size_t i = 0; i < a.observed[arm].size(); ++i) {
      EXPECT_EQ(a.observed[arm].cam_poses[i].Matrix(),
                b.observed[arm].cam_poses[i].Matrix());
      EXPECT_EQ(a.observed[arm].point_maps[i]->points,
                b.observed[arm].point_maps[i]->points);
    }
  }
  EXPECT_NE(Generate(Noisy(), 43).truth_lambda, a.truth_lambda);
}

TEST(GenerateTest, CleanPosesSatisfyForwardModel) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const SyntheticScene s = Generate(SceneConfig(), seed);
    const RigidTransform* w2b[2] = {&s.truth_world_to_base_1,
                                    &s.truth_world_to_base_2};
    const RigidTransform* x[2] = {&s.truth_extrinsic_1, &s.truth_extrinsic_2};
    for (int arm = 0; arm < 2; ++arm) {
      for (size_t i = 0; i < s.clean[arm].size(); ++i) {
        const Eigen::Matrix4d metric = w2b[arm]->Matrix().inverse() *
                                       s.clean[arm].ee_poses[i].Matrix() *
                                       x[arm]->Matrix();
        const Eigen::Matrix4d cam = s.clean[arm].cam_poses[i].Matrix();
        EXPECT_LT((cam.topLeftCorner<3, 3>() - metric.topLeftCorner<3, 3>())
                      .cwiseAbs()
                      .maxCoeff(),
                  1e-12);
        EXPECT_LT((s.truth_lambda * cam.topRightCorner<3, 1>() -
                   metric.topRightCorner<3, 1>())
                      .norm(),
                  1e-12);
      }
    }
  }
}

TEST(GenerateTest, TrajectoriesAreRotationallyDiverse) {
  SceneConfig config;
  config.views_per_arm = {9, 9};
  const SyntheticScene s = Generate(config, 7);
  for (int arm = 0; arm < 2; ++arm) {
    const auto rel = RelativeEe(s.clean[arm]);
    for (size_t i = 0; i < rel.size(); ++i) {
      EXPECT_GE(rel[i].rotation().Angle(), config.min_relative_angle);
    }
  }
}

TEST(GenerateTest, CubeVerticesAreExactInFloat) {
  const SyntheticScene s = Generate(SceneConfig(), 9);
  const PointMap& map = *s.clean[0].point_maps[0];
  for (int v = 0; v < 8; ++v) {
    const Eigen::Vector3d p = map.points[static_cast<size_t>(v)];
    EXPECT_EQ(p, testing::FloatRounded(p));
  }
  EXPECT_NEAR(s.cube_side, SceneConfig().cube_side, 1e-3 * s.cube_side);
  EXPECT_EQ(s.cube_edges.size(), 12u);
}

TEST(GenerateTest, UnsatisfiableDiversityBoundFails) {
  SceneConfig config;
  config.min_axis_separation = 1.6;  // more than any line angle can reach
  try {
    Generate(config, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()), "could not satisfy diversity bound");
  }
}

TEST(GenerateTest, TwoViewsAreDegenerateForTheSolver) {
  SceneConfig config;
  config.views_per_arm = {2, 2};
  const SyntheticScene s = Generate(config, 5);
  try {
    SolveInitial(s.Problem());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerate);
  }
}

TEST(GenerateTest, RejectsTooFewViews) {
  SceneConfig config;
  config.views_per_arm = {1, 4};
  EXPECT_THROW(Generate(config, 0), Error);
}

TEST(EmitManifestTest, LoadsBackBitExactly) {
  const SyntheticScene s = Generate(Noisy(), 11);
  const auto dir = testing::ScratchDir("emit");
  const auto path = EmitManifest(s, dir);
  EXPECT_TRUE(std::filesystem::exists(dir / "truth.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "pairs.json"));
  const CalibrationProblem p = LoadProblem(path);
  for (int arm = 0; arm < 2; ++arm) {
    for (size_t i = 0; i < s.observed[arm].size(); ++i) {
      EXPECT_EQ(p.arm(arm).cam_poses[i].Matrix(),
                s.observed[arm].cam_poses[i].Matrix());
      EXPECT_EQ(p.arm(arm).ee_poses[i].Matrix(),
                s.observed[arm].ee_poses[i].Matrix());
      EXPECT_EQ(p.arm(arm).point_maps[i]->points,
                s.observed[arm].point_maps[i]->points);
    }
  }
}

TEST(EmitManifestTest, MissingDirectoryIsIoError) {
  try {
    EmitManifest(Generate(SceneConfig(), 1), "/nonexistent/synth_out");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(LoadSceneConfigTest, ReadsFieldsAndKeepsDefaults) {
  const auto dir = testing::ScratchDir("config");
  std::ofstream(dir / "c.json")
      << R"({"views_per_arm": [4, 7], "lambda": 0.3,
             "trajectory": "single_axis",
             "noise": {"rot_sigma": 0.01, "trans_sigma": 0.02}})";
  const SceneConfig c = LoadSceneConfig(dir / "c.json");
  EXPECT_EQ(c.views_per_arm[0], 4);
  EXPECT_EQ(c.views_per_arm[1], 7);
  EXPECT_EQ(c.lambda.value(), 0.3);
  EXPECT_EQ(c.trajectory, TrajectoryKind::kSingleAxis);
  EXPECT_EQ(c.noise.trans_sigma, 0.02);
  EXPECT_EQ(c.noise.ee_rot_sigma, 0.0);
  EXPECT_EQ(c.cube_side, SceneConfig().cube_side);
}

TEST(LoadSceneConfigTest, BadFieldIsSchemaError) {
  const auto dir = testing::ScratchDir("bad_config");
  std::ofstream(dir / "c.json") << R"({"trajectory": "spiral"})";
  try {
    LoadSceneConfig(dir / "c.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSchema);
  }
}

}  // namespace
}  // namespace bimanual
