#ifndef BIMANUAL_PLY_H_
#define BIMANUAL_PLY_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace bimanual {

// Vertex element of a binary little-endian PLY file, every property widened
// to double.
struct PlyVertices {
  size_t count = 0;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  // nullptr when the property is absent.
  const std::vector<double>* Find(const std::string& name) const;
};

PlyVertices ReadPly(const std::filesystem::path& path);

// float32 x, y, z, confidence.
void WritePointMapPly(const std::filesystem::path& path,
                      std::span<const Eigen::Vector3d> points,
                      std::span<const double> confidences);

// float32 x, y, z, uint8 arm_id, uint16 view_id.
void WriteTaggedCloudPly(const std::filesystem::path& path,
                         std::span<const Eigen::Vector3d> points,
                         std::span<const uint8_t> arm_ids,
                         std::span<const uint16_t> view_ids);

}  // namespace bimanual

#endif  // BIMANUAL_PLY_H_
