#ifndef BIMANUAL_CAPTURE_H_
#define BIMANUAL_CAPTURE_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bimanual/lie.h"

namespace bimanual {

// Per-view reconstruction output in the model frame w (model units).
struct PointMap {
  std::vector<Eigen::Vector3d> points;
  std::vector<double> confidences;
  int source_view = 0;

  size_t size() const { return points.size(); }
};

// One arm's capture sequence. Index i of every list refers to the same
// capture instant. End-effector poses are base-frame poses in meters; camera
// poses are camera-to-world poses in the model frame, unscaled.
struct CaptureSet {
  int arm_id = 1;
  std::vector<RigidTransform> ee_poses;
  std::vector<RigidTransform> cam_poses;
  std::vector<std::optional<PointMap>> point_maps;  // empty or one per view
  std::vector<std::string> image_ids;               // empty or one per view

  size_t size() const { return ee_poses.size(); }
};

struct SolverOptions {
  double alpha = 0.5;                 // weight of rotation vs translation
  double confidence_threshold = 1.5;  // point-map confidence cutoff
  int gd_max_iters = 2000;
  double gd_step = 1e-2;
  double gd_tol = 1e-10;
  bool refine_enabled = true;

  // Throws kInvalidInput when a field is out of range.
  void Validate() const;
};

struct CalibrationProblem {
  CaptureSet primary;    // arm 1
  CaptureSet secondary;  // arm 2
  SolverOptions options;

  const CaptureSet& arm(int index) const {
    return index == 0 ? primary : secondary;
  }
};

// Throws kInvalidInput on length mismatches, fewer than 2 views, or point
// maps whose points/confidences disagree in length or are non-finite.
void ValidateCaptureSet(const CaptureSet& capture);

// Reads and validates a capture manifest. Rotations within 1e-6 of SO(3)
// are accepted (and projected when they miss by more than 1e-9). Point maps
// are loaded from the referenced PLY files.
CalibrationProblem LoadProblem(const std::filesystem::path& manifest_path);

// Writes `manifest.json` and one PLY per point map into `dir`, which must
// exist. Returns the manifest path. Values are written with 17 significant
// digits so that LoadProblem reproduces the poses bit-exactly.
std::filesystem::path WriteManifest(const CaptureSet& primary,
                                    const CaptureSet& secondary,
                                    const std::filesystem::path& dir);

// E_i^-1 E_{i+1} for consecutive views.
std::vector<RigidTransform> RelativeEe(const CaptureSet& capture);

// P_i(l)^-1 P_{i+1}(l) where P(l) has its translation scaled by `lambda`.
std::vector<RigidTransform> RelativeCam(const CaptureSet& capture,
                                        double lambda);

// Camera pose with translation scaled by `lambda`.
RigidTransform ScaledPose(const RigidTransform& pose, double lambda);

}  // namespace bimanual

#endif  // BIMANUAL_CAPTURE_H_
