#ifndef BIMANUAL_SYNTH_H_
#define BIMANUAL_SYNTH_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "bimanual/capture.h"
#include "bimanual/lie.h"

namespace bimanual {

struct NoiseSpec {
  double rot_sigma = 0.0;       // rad, left-multiplied on camera rotations
  double trans_sigma = 0.0;     // model units, on camera translations
  double ee_rot_sigma = 0.0;    // rad
  double ee_trans_sigma = 0.0;  // meters
  double point_sigma = 0.0;     // model units, on point-map points
};

enum class TrajectoryKind {
  kRandom,           // diverse rotations, rejection-sampled
  kSingleAxis,       // every relative rotation shares one axis
  kPureTranslation,  // constant orientation
};

struct SceneConfig {
  std::array<int, 2> views_per_arm = {6, 6};
  // Fixed scale, or log-uniform in lambda_range when unset. The default
  // range puts a tabletop scene at roughly one model unit across.
  std::optional<double> lambda;
  std::array<double, 2> lambda_range = {0.2, 0.5};

  // Pose of base 2 in base 1: translation, then yaw about z.
  Eigen::Vector3d base_offset = Eigen::Vector3d(0.8, 0.0, 0.0);
  double base_yaw = 3.14159265358979323846;
  double world_translation_range = 0.5;  // meters, per axis

  // End-effector positions, in each arm's own base frame.
  Eigen::Vector3d workspace_center = Eigen::Vector3d(0.4, 0.0, 0.3);
  Eigen::Vector3d workspace_extent = Eigen::Vector3d(0.15, 0.15, 0.1);
  double max_tilt = 0.6;              // rad, away from the downward tool axis
  double min_relative_angle = 0.15;   // rad, per consecutive motion
  double min_axis_separation = 0.17;  // rad, between relative rotation axes
  double max_extrinsic_offset = 0.08;  // meters, per axis
  TrajectoryKind trajectory = TrajectoryKind::kRandom;

  NoiseSpec noise;

  bool point_maps = true;
  double cube_side = 0.1;  // meters, approximate; see SyntheticScene
  Eigen::Vector3d cube_center = Eigen::Vector3d(0.4, 0.0, 0.05);  // base 1
  int edge_samples = 3;
  int clutter_points = 16;
};

// Reads a SceneConfig from JSON; absent fields keep their defaults.
SceneConfig LoadSceneConfig(const std::filesystem::path& path);

struct SyntheticScene {
  RigidTransform truth_extrinsic_1;
  RigidTransform truth_extrinsic_2;
  double truth_lambda = 1.0;
  RigidTransform truth_world_to_base_1;
  RigidTransform truth_world_to_base_2;
  std::array<std::vector<RigidTransform>, 2> ee_trajectories;
  NoiseSpec noise;
  uint64_t rng_seed = 0;

  // Noisy observations and their noiseless counterparts.
  std::array<CaptureSet, 2> observed;
  std::array<CaptureSet, 2> clean;

  // The reference cube's true side in meters. Its eight vertices are the
  // first eight points of every point map and are exact in float32.
  double cube_side = 0.0;
  std::vector<std::pair<int, int>> cube_edges;

  RigidTransform TruthBaseToBase() const {
    return truth_world_to_base_1 * truth_world_to_base_2.Inverse();
  }
  CalibrationProblem Problem() const { return {observed[0], observed[1], {}}; }
  CalibrationProblem CleanProblem() const { return {clean[0], clean[1], {}}; }
};

// Deterministic in (config, seed). Throws kInvalidInput with "could not
// satisfy diversity bound" after 10^4 rejected trajectories.
SyntheticScene Generate(const SceneConfig& config, uint64_t seed);

// Writes manifest.json with its point maps, truth.json and pairs.json
// (cube edges as indices into the fused metric cloud) into an existing
// directory. Returns the manifest path.
std::filesystem::path EmitManifest(const SyntheticScene& scene,
                                   const std::filesystem::path& dir);

}  // namespace bimanual

#endif  // BIMANUAL_SYNTH_H_
