#include "bimanual/frame_recovery.h"

#include <algorithm>
#include <sstream>

#include "bimanual/error.h"

namespace bimanual {
namespace {

// Spreads smaller than this are numerical noise, whatever the residuals.
constexpr double kSpreadFloor = 1e-6;

ClosureSpread SpreadAround(const std::vector<RigidTransform>& closures,
                           const RigidTransform& mean) {
  ClosureSpread spread;
  for (const RigidTransform& c : closures) {
    spread.max_rotation = std::max(
        spread.max_rotation, GeodesicDistance(c.rotation(), mean.rotation()));
    spread.max_translation =
        std::max(spread.max_translation,
                 (c.translation() - mean.translation()).norm());
  }
  return spread;
}

void CheckSpread(int arm_id, const ClosureSpread& spread,
                 const Residuals& residuals,
                 std::vector<std::string>* warnings) {
  const bool rotation_off = spread.max_rotation > kSpreadFloor &&
                            spread.max_rotation > 5.0 * residuals.rotation;
  const bool translation_off =
      spread.max_translation > kSpreadFloor &&
      spread.max_translation > 5.0 * residuals.translation;
  if (rotation_off || translation_off) {
    std::ostringstream msg;
    msg << "arm " << arm_id << ": world-to-base closures spread "
        << spread.max_rotation << " rad / " << spread.max_translation
        << " m, more than 5x the mean residual; check pose conventions";
    warnings->push_back(msg.str());
  }
}

}  // namespace

RigidTransform RecoverWorldToBase(const CaptureSet& capture,
                                  const RigidTransform& extrinsic,
                                  double lambda, ClosureSpread* spread) {
  if (!(lambda > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "scale must be positive");
  }
  if (capture.ee_poses.size() != capture.cam_poses.size()) {
    throw Error(ErrorKind::kInvalidInput, "length mismatch");
  }
  std::vector<RigidTransform> closures;
  closures.reserve(capture.size());
  for (size_t i = 0; i < capture.size(); ++i) {
    closures.push_back(capture.ee_poses[i] * extrinsic *
                       ScaledPose(capture.cam_poses[i], lambda).Inverse());
  }
  const RigidTransform mean = AverageSE3(closures);
  if (spread != nullptr) {
    *spread = SpreadAround(closures, mean);
  }
  return mean;
}

RigidTransform RelativeClosureAverage(const CaptureSet& capture,
                                      const RigidTransform& extrinsic,
                                      double lambda) {
  const auto rel_ee = RelativeEe(capture);
  const auto rel_cam = RelativeCam(capture, lambda);
  std::vector<RigidTransform> terms;
  terms.reserve(rel_ee.size());
  for (size_t i = 0; i < rel_ee.size(); ++i) {
    terms.push_back(rel_ee[i] * (extrinsic * rel_cam[i]).Inverse());
  }
  return AverageSE3(terms);
}

RigidTransform BaseToBase(const RigidTransform& world_to_base_1,
                          const RigidTransform& world_to_base_2) {
  return world_to_base_1 * world_to_base_2.Inverse();
}

Residuals ComputeResiduals(const CalibrationProblem& problem,
                           const RigidTransform& extrinsic_1,
                           const RigidTransform& extrinsic_2, double lambda) {
  const RigidTransform* extrinsics[2] = {&extrinsic_1, &extrinsic_2};
  std::vector<double> angles;
  std::vector<double> distances;
  for (int a = 0; a < 2; ++a) {
    const auto rel_ee = RelativeEe(problem.arm(a));
    const auto rel_cam = RelativeCam(problem.arm(a), lambda);
    const RigidTransform& x = *extrinsics[a];
    for (size_t i = 0; i < rel_ee.size(); ++i) {
      const RigidTransform lhs = rel_ee[i] * x;
      const RigidTransform rhs = x * rel_cam[i];
      angles.push_back(GeodesicDistance(lhs.rotation(), rhs.rotation()));
      distances.push_back((lhs.translation() - rhs.translation()).norm());
    }
  }
  Residuals r;
  const double n = static_cast<double>(angles.size());
  r.rotation = CanonicalSum(angles) / n;
  r.translation = CanonicalSum(distances) / n;
  return r;
}

Residuals ComputeResiduals(const CalibrationProblem& problem,
                           const CalibrationSolution& solution) {
  return ComputeResiduals(problem, solution.extrinsic_1, solution.extrinsic_2,
                          solution.lambda);
}

CalibrationSolution AssembleSolution(const CalibrationProblem& problem,
                                     const RigidTransform& extrinsic_1,
                                     const RigidTransform& extrinsic_2,
                                     double lambda) {
  CalibrationSolution s;
  s.extrinsic_1 = extrinsic_1;
  s.extrinsic_2 = extrinsic_2;
  s.lambda = lambda;
  s.world_to_base_1 =
      RecoverWorldToBase(problem.primary, extrinsic_1, lambda, &s.spread_1);
  s.world_to_base_2 =
      RecoverWorldToBase(problem.secondary, extrinsic_2, lambda, &s.spread_2);
  s.base_1_to_base_2 = BaseToBase(s.world_to_base_1, s.world_to_base_2);
  s.residuals = ComputeResiduals(problem, extrinsic_1, extrinsic_2, lambda);
  CheckSpread(1, s.spread_1, s.residuals, &s.warnings);
  CheckSpread(2, s.spread_2, s.residuals, &s.warnings);
  return s;
}

}  // namespace bimanual
