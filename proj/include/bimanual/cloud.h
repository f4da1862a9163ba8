#ifndef BIMANUAL_CLOUD_H_
#define BIMANUAL_CLOUD_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "bimanual/capture.h"
#include "bimanual/frame_recovery.h"
#include "bimanual/lie.h"

namespace bimanual {

struct PointSource {
  uint8_t arm_id = 1;
  uint16_t view_id = 0;
};

// Points in the primary base frame, meters.
struct MetricCloud {
  std::vector<Eigen::Vector3d> points;
  std::vector<PointSource> sources;

  size_t size() const { return points.size(); }
};

// Keeps the points whose confidence is >= threshold.
PointMap FilterByConfidence(const PointMap& map, double threshold);

// x -> world_to_base_1 * (lambda * x). Every point is tagged with
// (arm_id, map.source_view).
MetricCloud ToMetricFrame(const PointMap& map, double lambda,
                          const RigidTransform& world_to_base_1,
                          int arm_id = 1);

// Concatenation in the given order.
MetricCloud Fuse(std::span<const MetricCloud> clouds);

// Filters, scales and transforms every point map of both arms into the
// primary base frame. Arm 1 views come first in ascending order, then arm 2.
MetricCloud BuildMetricCloud(const CalibrationProblem& problem,
                             const CalibrationSolution& solution,
                             double confidence_threshold);

// |reconstructed - real| / real. Throws kInvalidInput unless real > 0.
double ScaleError(double reconstructed_length, double real_length);

void WriteMetricCloud(const std::filesystem::path& path,
                      const MetricCloud& cloud);
MetricCloud ReadMetricCloud(const std::filesystem::path& path);

}  // namespace bimanual

#endif  // BIMANUAL_CLOUD_H_
