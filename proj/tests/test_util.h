#ifndef BIMANUAL_TESTS_TEST_UTIL_H_
#define BIMANUAL_TESTS_TEST_UTIL_H_

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>

#include "bimanual/lie.h"

namespace bimanual::testing {

inline Eigen::Vector3d RandomUnit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Vector3d v;
  do {
    v = Eigen::Vector3d(n(rng), n(rng), n(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

inline double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Power series of the matrix exponential of skew(v), summed until the terms
// vanish. Independent of Rodrigues' formula.
inline Eigen::Matrix3d SeriesExp(const Eigen::Vector3d& v) {
  Eigen::Matrix3d k;
  k << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  Eigen::Matrix3d sum = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d term = Eigen::Matrix3d::Identity();
  for (int n = 1; n < 60; ++n) {
    term = term * k / n;
    sum += term;
  }
  return sum;
}

inline Rotation RandomRotation(std::mt19937_64& rng) {
  return ExpMapSO3(Uniform(rng, 0.0, 3.14159) * RandomUnit(rng));
}

inline RigidTransform RandomTransform(std::mt19937_64& rng,
                                      double translation_range = 1.0) {
  const double r = translation_range;
  return RigidTransform(
      RandomRotation(rng),
      Eigen::Vector3d(Uniform(rng, -r, r), Uniform(rng, -r, r),
                      Uniform(rng, -r, r)));
}

inline double TranslationError(const RigidTransform& a,
                               const RigidTransform& b) {
  return (a.translation() - b.translation()).norm();
}

inline double RotationError(const RigidTransform& a, const RigidTransform& b) {
  return GeodesicDistance(a.rotation(), b.rotation());
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path ScratchDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("bimanual_test_" + name + "_" +
                    std::to_string(std::random_device{}()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline Eigen::Vector3d FloatRounded(const Eigen::Vector3d& v) {
  return v.cast<float>().cast<double>();
}

}  // namespace bimanual::testing

#endif  // BIMANUAL_TESTS_TEST_UTIL_H_
