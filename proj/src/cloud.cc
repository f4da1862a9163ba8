#include "bimanual/cloud.h"

#include <cmath>
#include <limits>

#include "bimanual/error.h"
#include "bimanual/ply.h"

namespace bimanual {

PointMap FilterByConfidence(const PointMap& map, double threshold) {
  if (!(threshold >= 0.0)) {
    throw Error(ErrorKind::kInvalidInput,
                "confidence threshold must be non-negative");
  }
  if (map.points.size() != map.confidences.size()) {
    throw Error(ErrorKind::kInvalidInput, "length mismatch");
  }
  PointMap kept;
  kept.source_view = map.source_view;
  for (size_t i = 0; i < map.size(); ++i) {
    if (map.confidences[i] >= threshold) {
      kept.points.push_back(map.points[i]);
      kept.confidences.push_back(map.confidences[i]);
    }
  }
  return kept;
}

MetricCloud ToMetricFrame(const PointMap& map, double lambda,
                          const RigidTransform& world_to_base_1, int arm_id) {
  if (!(lambda > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "scale must be positive");
  }
  if (map.source_view < 0 ||
      map.source_view > std::numeric_limits<uint16_t>::max()) {
    throw Error(ErrorKind::kInvalidInput, "view index out of range");
  }
  MetricCloud cloud;
  cloud.points.reserve(map.size());
  const PointSource source{static_cast<uint8_t>(arm_id),
                           static_cast<uint16_t>(map.source_view)};
  for (const Eigen::Vector3d& x : map.points) {
    cloud.points.push_back(world_to_base_1 * (lambda * x));
  }
  cloud.sources.assign(map.size(), source);
  return cloud;
}

MetricCloud Fuse(std::span<const MetricCloud> clouds) {
  MetricCloud fused;
  for (const MetricCloud& c : clouds) {
    fused.points.insert(fused.points.end(), c.points.begin(), c.points.end());
    fused.sources.insert(fused.sources.end(), c.sources.begin(),
                         c.sources.end());
  }
  return fused;
}

MetricCloud BuildMetricCloud(const CalibrationProblem& problem,
                             const CalibrationSolution& solution,
                             double confidence_threshold) {
  std::vector<MetricCloud> parts;
  for (int a = 0; a < 2; ++a) {
    const CaptureSet& capture = problem.arm(a);
    for (const auto& map : capture.point_maps) {
      if (!map.has_value()) continue;
      parts.push_back(ToMetricFrame(
          FilterByConfidence(*map, confidence_threshold), solution.lambda,
          solution.world_to_base_1, capture.arm_id));
    }
  }
  return Fuse(parts);
}

double ScaleError(double reconstructed_length, double real_length) {
  if (!(real_length > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "real length must be positive");
  }
  return std::abs(reconstructed_length - real_length) / real_length;
}

void WriteMetricCloud(const std::filesystem::path& path,
                      const MetricCloud& cloud) {
  std::vector<uint8_t> arms;
  std::vector<uint16_t> views;
  arms.reserve(cloud.size());
  views.reserve(cloud.size());
  for (const PointSource& s : cloud.sources) {
    arms.push_back(s.arm_id);
    views.push_back(s.view_id);
  }
  WriteTaggedCloudPly(path, cloud.points, arms, views);
}

MetricCloud ReadMetricCloud(const std::filesystem::path& path) {
  const PlyVertices ply = ReadPly(path);
  const auto* x = ply.Find("x");
  const auto* y = ply.Find("y");
  const auto* z = ply.Find("z");
  if (x == nullptr || y == nullptr || z == nullptr) {
    throw Error(ErrorKind::kSchema, path.string() + ": cloud needs x, y, z");
  }
  const auto* arm = ply.Find("arm_id");
  const auto* view = ply.Find("view_id");
  MetricCloud cloud;
  for (size_t i = 0; i < ply.count; ++i) {
    cloud.points.emplace_back((*x)[i], (*y)[i], (*z)[i]);
    PointSource s;
    if (arm != nullptr) s.arm_id = static_cast<uint8_t>((*arm)[i]);
    if (view != nullptr) s.view_id = static_cast<uint16_t>((*view)[i]);
    cloud.sources.push_back(s);
  }
  return cloud;
}

}  // namespace bimanual
