#include "bimanual/capture.h"

#include <cmath>
#include <set>
#include <sstream>

#include "bimanual/error.h"
#include "bimanual/ply.h"
#include "json_util.h"

namespace bimanual {
namespace {

// Tolerance for rotations read from disk; exports carry float32 noise.
constexpr double kInputRotationTolerance = 1e-6;

Error SchemaError(const std::string& pointer, const std::string& what) {
  return Error(ErrorKind::kSchema,
               "schema violation at " + pointer + ": " + what);
}

RigidTransform ParsePose(const nlohmann::json& value,
                         const std::string& pointer, int arm_id, size_t view) {
  const Eigen::Matrix4d m = JsonToMatrix4(value, pointer);
  if (m(3, 0) != 0.0 || m(3, 1) != 0.0 || m(3, 2) != 0.0 || m(3, 3) != 1.0) {
    throw SchemaError(pointer, "bottom row must be [0, 0, 0, 1]");
  }
  try {
    return RigidTransform(
        Rotation::FromNearlyOrthonormal(m.topLeftCorner<3, 3>(),
                                        kInputRotationTolerance),
        m.topRightCorner<3, 1>());
  } catch (const Error&) {
    std::ostringstream msg;
    msg << "non-rigid rotation at arm " << arm_id << ", view " << view
        << " (" << pointer << ")";
    throw Error(ErrorKind::kInvalidInput, msg.str());
  }
}

PointMap LoadPointMap(const std::filesystem::path& path, int view) {
  const PlyVertices ply = ReadPly(path);
  const auto* x = ply.Find("x");
  const auto* y = ply.Find("y");
  const auto* z = ply.Find("z");
  const auto* confidence = ply.Find("confidence");
  if (x == nullptr || y == nullptr || z == nullptr || confidence == nullptr) {
    throw Error(ErrorKind::kSchema,
                path.string() + ": point map needs x, y, z and confidence");
  }
  PointMap map;
  map.source_view = view;
  map.points.reserve(ply.count);
  map.confidences = *confidence;
  for (size_t i = 0; i < ply.count; ++i) {
    map.points.emplace_back((*x)[i], (*y)[i], (*z)[i]);
  }
  return map;
}

CaptureSet ParseArm(const nlohmann::json& arm, const std::string& pointer,
                    const std::filesystem::path& base_dir) {
  if (!arm.is_object()) {
    throw SchemaError(pointer, "expected an object");
  }
  if (!arm.contains("arm_id") || !arm["arm_id"].is_number_integer()) {
    throw SchemaError(pointer + "/arm_id", "expected an integer");
  }
  CaptureSet capture;
  capture.arm_id = arm["arm_id"].get<int>();
  if (capture.arm_id != 1 && capture.arm_id != 2) {
    throw SchemaError(pointer + "/arm_id", "must be 1 or 2");
  }
  if (!arm.contains("views") || !arm["views"].is_array()) {
    throw SchemaError(pointer + "/views", "expected an array");
  }
  const auto& views = arm["views"];
  bool any_point_map = false;
  for (size_t i = 0; i < views.size(); ++i) {
    const std::string view_ptr = pointer + "/views/" + std::to_string(i);
    const auto& view = views[i];
    if (!view.is_object()) {
      throw SchemaError(view_ptr, "expected an object");
    }
    for (const char* key : {"ee_pose", "cam_pose"}) {
      if (!view.contains(key)) {
        throw SchemaError(view_ptr + "/" + key, "missing");
      }
    }
    std::string image_id = "view_" + std::to_string(i);
    if (view.contains("image_id")) {
      if (!view["image_id"].is_string()) {
        throw SchemaError(view_ptr + "/image_id", "expected a string");
      }
      image_id = view["image_id"].get<std::string>();
    }
    capture.image_ids.push_back(image_id);
    capture.ee_poses.push_back(ParsePose(view["ee_pose"], view_ptr + "/ee_pose",
                                         capture.arm_id, i));
    capture.cam_poses.push_back(ParsePose(
        view["cam_pose"], view_ptr + "/cam_pose", capture.arm_id, i));
    if (view.contains("point_map") && !view["point_map"].is_null()) {
      if (!view["point_map"].is_string()) {
        throw SchemaError(view_ptr + "/point_map", "expected a path string");
      }
      capture.point_maps.push_back(LoadPointMap(
          base_dir / view["point_map"].get<std::string>(),
          static_cast<int>(i)));
      any_point_map = true;
    } else {
      capture.point_maps.push_back(std::nullopt);
    }
  }
  if (!any_point_map) {
    capture.point_maps.clear();
  }
  return capture;
}

nlohmann::json PoseJson(const RigidTransform& t) {
  return MatrixToJson(t.Matrix());
}

nlohmann::json ArmJson(const CaptureSet& capture,
                       const std::filesystem::path& dir) {
  nlohmann::json views = nlohmann::json::array();
  for (size_t i = 0; i < capture.size(); ++i) {
    nlohmann::json view;
    const std::string image_id =
        capture.image_ids.empty()
            ? "a" + std::to_string(capture.arm_id) + "_v" + std::to_string(i)
            : capture.image_ids[i];
    view["image_id"] = image_id;
    view["ee_pose"] = PoseJson(capture.ee_poses[i]);
    view["cam_pose"] = PoseJson(capture.cam_poses[i]);
    if (!capture.point_maps.empty() && capture.point_maps[i].has_value()) {
      const std::string file = image_id + ".ply";
      const PointMap& map = *capture.point_maps[i];
      WritePointMapPly(dir / file, map.points, map.confidences);
      view["point_map"] = file;
    }
    views.push_back(std::move(view));
  }
  return {{"arm_id", capture.arm_id}, {"views", std::move(views)}};
}

}  // namespace

void SolverOptions::Validate() const {
  const auto fail = [](const std::string& what) {
    return Error(ErrorKind::kInvalidInput, "invalid solver option: " + what);
  };
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw fail("alpha must be in [0, 1]");
  if (!(confidence_threshold >= 0.0)) {
    throw fail("confidence_threshold must be non-negative");
  }
  if (gd_max_iters <= 0) throw fail("gd_max_iters must be positive");
  if (!(gd_step > 0.0) || !std::isfinite(gd_step)) {
    throw fail("gd_step must be positive");
  }
  if (!(gd_tol > 0.0) || !std::isfinite(gd_tol)) {
    throw fail("gd_tol must be positive");
  }
}

void ValidateCaptureSet(const CaptureSet& capture) {
  const size_t n = capture.ee_poses.size();
  const std::string arm = "arm " + std::to_string(capture.arm_id);
  if (capture.cam_poses.size() != n ||
      (!capture.point_maps.empty() && capture.point_maps.size() != n) ||
      (!capture.image_ids.empty() && capture.image_ids.size() != n)) {
    throw Error(ErrorKind::kInvalidInput, "length mismatch on " + arm);
  }
  if (n < 2) {
    throw Error(ErrorKind::kInvalidInput, "fewer than 2 views on " + arm);
  }
  for (size_t i = 0; i < capture.point_maps.size(); ++i) {
    if (!capture.point_maps[i].has_value()) continue;
    const PointMap& map = *capture.point_maps[i];
    if (map.points.size() != map.confidences.size()) {
      throw Error(ErrorKind::kInvalidInput,
                  "length mismatch in point map of " + arm + ", view " +
                      std::to_string(i));
    }
    for (size_t k = 0; k < map.size(); ++k) {
      if (!map.points[k].allFinite() || !std::isfinite(map.confidences[k]) ||
          map.confidences[k] < 0.0) {
        throw Error(ErrorKind::kInvalidInput,
                    "invalid point in point map of " + arm + ", view " +
                        std::to_string(i));
      }
    }
  }
}

CalibrationProblem LoadProblem(const std::filesystem::path& manifest_path) {
  const nlohmann::json manifest = ReadJsonFile(manifest_path);
  if (!manifest.is_object()) {
    throw SchemaError("/", "expected an object");
  }
  if (!manifest.contains("version") || manifest["version"] != 1) {
    throw SchemaError("/version", "expected 1");
  }
  if (!manifest.contains("arms") || !manifest["arms"].is_array()) {
    throw SchemaError("/arms", "expected an array");
  }
  const auto& arms = manifest["arms"];
  if (arms.size() < 2) {
    throw SchemaError("/arms", "fewer than 2 arms");
  }
  if (arms.size() > 2) {
    throw SchemaError("/arms", "more than 2 arms");
  }

  const std::filesystem::path base_dir = manifest_path.parent_path();
  CalibrationProblem problem;
  std::set<int> seen;
  for (size_t a = 0; a < arms.size(); ++a) {
    const std::string pointer = "/arms/" + std::to_string(a);
    CaptureSet capture = ParseArm(arms[a], pointer, base_dir);
    if (!seen.insert(capture.arm_id).second) {
      throw SchemaError(pointer + "/arm_id", "duplicate arm id");
    }
    if (capture.size() < 2) {
      throw Error(ErrorKind::kSchema, "fewer than 2 views on arm " +
                                          std::to_string(capture.arm_id));
    }
    ValidateCaptureSet(capture);
    (capture.arm_id == 1 ? problem.primary : problem.secondary) =
        std::move(capture);
  }
  return problem;
}

std::filesystem::path WriteManifest(const CaptureSet& primary,
                                    const CaptureSet& secondary,
                                    const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorKind::kIo, "output directory does not exist: " +
                                    dir.string());
  }
  nlohmann::json manifest;
  manifest["version"] = 1;
  manifest["arms"] = {ArmJson(primary, dir), ArmJson(secondary, dir)};
  const std::filesystem::path path = dir / "manifest.json";
  WriteTextFile(path, DumpJson(manifest) + "\n");
  return path;
}

RigidTransform ScaledPose(const RigidTransform& pose, double lambda) {
  return RigidTransform(pose.rotation(), lambda * pose.translation());
}

std::vector<RigidTransform> RelativeEe(const CaptureSet& capture) {
  if (capture.size() < 2) {
    throw Error(ErrorKind::kInvalidInput, "fewer than 2 views on arm " +
                                              std::to_string(capture.arm_id));
  }
  std::vector<RigidTransform> relative;
  relative.reserve(capture.size() - 1);
  for (size_t i = 0; i + 1 < capture.size(); ++i) {
    relative.push_back(capture.ee_poses[i].Inverse() *
                       capture.ee_poses[i + 1]);
  }
  return relative;
}

std::vector<RigidTransform> RelativeCam(const CaptureSet& capture,
                                        double lambda) {
  if (!(lambda > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "scale must be positive");
  }
  if (capture.cam_poses.size() < 2) {
    throw Error(ErrorKind::kInvalidInput, "fewer than 2 views on arm " +
                                              std::to_string(capture.arm_id));
  }
  std::vector<RigidTransform> relative;
  relative.reserve(capture.cam_poses.size() - 1);
  for (size_t i = 0; i + 1 < capture.cam_poses.size(); ++i) {
    relative.push_back(ScaledPose(capture.cam_poses[i], lambda).Inverse() *
                       ScaledPose(capture.cam_poses[i + 1], lambda));
  }
  return relative;
}

}  // namespace bimanual
