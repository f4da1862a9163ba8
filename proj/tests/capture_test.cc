#include "bimanual/capture.h"

#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "bimanual/error.h"
#include "bimanual/ply.h"
#include "bimanual/synth.h"
#include "test_util.h"

namespace bimanual {
namespace {

using testing::ScratchDir;

SyntheticScene NoisyScene(uint64_t seed) {
  SceneConfig config;
  config.views_per_arm = {5, 7};
  config.noise.rot_sigma = 0.01;
  config.noise.trans_sigma = 0.01;
  config.noise.point_sigma = 0.001;
  return Generate(config, seed);
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

std::string Pose(double tx) {
  return "[[1,0,0," + std::to_string(tx) + "],[0,1,0,0],[0,0,1,0],[0,0,0,1]]";
}

std::string ArmJson(int arm_id, int views) {
  std::string s = "{\"arm_id\": " + std::to_string(arm_id) + ", \"views\": [";
  for (int i = 0; i < views; ++i) {
    if (i > 0) s += ",";
    s += "{\"ee_pose\": " + Pose(0.1 * i) + ", \"cam_pose\": " + Pose(0.2 * i) +
         "}";
  }
  return s + "]}";
}

ErrorKind LoadErrorKind(const std::filesystem::path& path, std::string* what) {
  try {
    LoadProblem(path);
  } catch (const Error& e) {
    *what = e.what();
    return e.kind();
  }
  ADD_FAILURE() << "expected LoadProblem to fail";
  return ErrorKind::kIo;
}

TEST(ManifestTest, RoundTripIsBitExact) {
  const SyntheticScene scene = NoisyScene(5);
  const auto dir = ScratchDir("roundtrip");
  const auto path = WriteManifest(scene.observed[0], scene.observed[1], dir);
  const CalibrationProblem loaded = LoadProblem(path);
  for (int a = 0; a < 2; ++a) {
    const CaptureSet& want = scene.observed[a];
    const CaptureSet& got = loaded.arm(a);
    ASSERT_EQ(got.size(), want.size());
    EXPECT_EQ(got.arm_id, want.arm_id);
    EXPECT_EQ(got.image_ids, want.image_ids);
    for (size_t i = 0; i < want.size(); ++i) {
      EXPECT_EQ(got.ee_poses[i].Matrix(), want.ee_poses[i].Matrix());
      EXPECT_EQ(got.cam_poses[i].Matrix(), want.cam_poses[i].Matrix());
      ASSERT_TRUE(got.point_maps[i].has_value());
      EXPECT_EQ(got.point_maps[i]->points, want.point_maps[i]->points);
      EXPECT_EQ(got.point_maps[i]->confidences,
                want.point_maps[i]->confidences);
      EXPECT_EQ(got.point_maps[i]->source_view, static_cast<int>(i));
    }
  }
}

TEST(ManifestTest, OneArmIsRejected) {
  const auto dir = ScratchDir("one_arm");
  WriteText(dir / "m.json",
            "{\"version\": 1, \"arms\": [" + ArmJson(1, 3) + "]}");
  std::string what;
  EXPECT_EQ(LoadErrorKind(dir / "m.json", &what), ErrorKind::kSchema);
  EXPECT_NE(what.find("fewer than 2 arms"), std::string::npos) << what;
}

TEST(ManifestTest, WrongVersionIsRejected) {
  const auto dir = ScratchDir("version");
  WriteText(dir / "m.json", "{\"version\": 2, \"arms\": [" + ArmJson(1, 3) +
                                "," + ArmJson(2, 3) + "]}");
  std::string what;
  EXPECT_EQ(LoadErrorKind(dir / "m.json", &what), ErrorKind::kSchema);
  EXPECT_NE(what.find("/version"), std::string::npos) << what;
}

TEST(ManifestTest, SingleViewArmIsRejected) {
  const auto dir = ScratchDir("one_view");
  WriteText(dir / "m.json", "{\"version\": 1, \"arms\": [" + ArmJson(1, 3) +
                                "," + ArmJson(2, 1) + "]}");
  std::string what;
  LoadErrorKind(dir / "m.json", &what);
  EXPECT_NE(what.find("fewer than 2 views"), std::string::npos) << what;
}

TEST(ManifestTest, UnequalViewCountsAreAccepted) {
  const auto dir = ScratchDir("unequal");
  WriteText(dir / "m.json", "{\"version\": 1, \"arms\": [" + ArmJson(2, 4) +
                                "," + ArmJson(1, 3) + "]}");
  const CalibrationProblem p = LoadProblem(dir / "m.json");
  EXPECT_EQ(p.primary.size(), 3u);
  EXPECT_EQ(p.secondary.size(), 4u);
  EXPECT_TRUE(p.primary.point_maps.empty());
}

TEST(ManifestTest, NonRigidRotationIsRejected) {
  const auto dir = ScratchDir("nonrigid");
  std::string arm = ArmJson(2, 3);
  const std::string bad = "[[1.001,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]";
  arm.replace(arm.find(Pose(0.0)), Pose(0.0).size(), bad);
  WriteText(dir / "m.json",
            "{\"version\": 1, \"arms\": [" + ArmJson(1, 3) + "," + arm + "]}");
  std::string what;
  EXPECT_EQ(LoadErrorKind(dir / "m.json", &what), ErrorKind::kInvalidInput);
  EXPECT_NE(what.find("non-rigid rotation at arm 2, view 0"),
            std::string::npos)
      << what;
}

TEST(ManifestTest, SlightlyOffRotationIsProjected) {
  const auto dir = ScratchDir("projected");
  std::string arm = ArmJson(2, 3);
  const std::string off =
      "[[1.0000003,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]";
  arm.replace(arm.find(Pose(0.0)), Pose(0.0).size(), off);
  WriteText(dir / "m.json",
            "{\"version\": 1, \"arms\": [" + ArmJson(1, 3) + "," + arm + "]}");
  const CalibrationProblem p = LoadProblem(dir / "m.json");
  EXPECT_LT((p.secondary.ee_poses[0].rotation().matrix() -
             Eigen::Matrix3d::Identity())
                .norm(),
            1e-15);
}

TEST(ManifestTest, MissingFileIsIoError) {
  std::string what;
  EXPECT_EQ(LoadErrorKind("/nonexistent/manifest.json", &what), ErrorKind::kIo);
}

TEST(ManifestTest, WriteIntoMissingDirectoryFails) {
  const SyntheticScene scene = NoisyScene(1);
  try {
    WriteManifest(scene.observed[0], scene.observed[1], "/nonexistent/dir");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(CaptureSetTest, LengthMismatchIsRejected) {
  CaptureSet cs;
  cs.arm_id = 2;
  cs.ee_poses.resize(3);
  cs.cam_poses.resize(2);
  try {
    ValidateCaptureSet(cs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()), "length mismatch on arm 2");
  }
}

TEST(CaptureSetTest, RelativeCamScalesTranslationsOnly) {
  std::mt19937_64 rng(3);
  CaptureSet cs;
  for (int i = 0; i < 4; ++i) {
    cs.ee_poses.push_back(testing::RandomTransform(rng));
    cs.cam_poses.push_back(testing::RandomTransform(rng));
  }
  const auto unit = RelativeCam(cs, 1.0);
  const auto scaled = RelativeCam(cs, 2.5);
  for (size_t i = 0; i < unit.size(); ++i) {
    EXPECT_LT(testing::RotationError(unit[i], scaled[i]), 1e-15);
    EXPECT_LT((2.5 * unit[i].translation() - scaled[i].translation()).norm(),
              1e-14);
    const Eigen::Matrix4d oracle =
        cs.cam_poses[i].Matrix().inverse() * cs.cam_poses[i + 1].Matrix();
    EXPECT_LT((unit[i].Matrix() - oracle).cwiseAbs().maxCoeff(), 1e-12);
  }
  const auto ee = RelativeEe(cs);
  ASSERT_EQ(ee.size(), 3u);
  EXPECT_LT((ee[0].Matrix() -
             cs.ee_poses[0].Matrix().inverse() * cs.ee_poses[1].Matrix())
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(SolverOptionsTest, RejectsOutOfRangeValues) {
  SolverOptions o;
  EXPECT_NO_THROW(o.Validate());
  o.alpha = 1.5;
  EXPECT_THROW(o.Validate(), Error);
  o = SolverOptions();
  o.gd_max_iters = 0;
  EXPECT_THROW(o.Validate(), Error);
  o = SolverOptions();
  o.gd_step = -1.0;
  EXPECT_THROW(o.Validate(), Error);
}

TEST(PlyTest, PointMapRoundTrip) {
  const auto dir = ScratchDir("ply");
  const std::vector<Eigen::Vector3d> points = {{0.5, -1.25, 3.0},
                                               {1e-3, 2.0, -7.5}};
  const std::vector<double> conf = {0.25, 4.0};
  WritePointMapPly(dir / "p.ply", points, conf);
  const PlyVertices ply = ReadPly(dir / "p.ply");
  ASSERT_EQ(ply.count, 2u);
  EXPECT_EQ((*ply.Find("x"))[1], static_cast<double>(1e-3f));
  EXPECT_EQ((*ply.Find("z"))[1], -7.5);
  EXPECT_EQ(*ply.Find("confidence"), conf);
  EXPECT_EQ(ply.Find("red"), nullptr);
}

TEST(PlyTest, AsciiIsRejected) {
  const auto dir = ScratchDir("ascii");
  WriteText(dir / "a.ply",
            "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\n"
            "end_header\n1.0\n");
  try {
    ReadPly(dir / "a.ply");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSchema);
  }
}

}  // namespace
}  // namespace bimanual
