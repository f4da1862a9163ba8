#ifndef BIMANUAL_FRAME_RECOVERY_H_
#define BIMANUAL_FRAME_RECOVERY_H_

#include <string>
#include <vector>

#include "bimanual/capture.h"
#include "bimanual/lie.h"

namespace bimanual {

// Spread of the per-view closures around their average.
struct ClosureSpread {
  double max_rotation = 0.0;     // radians
  double max_translation = 0.0;  // meters
};

struct Residuals {
  double rotation = 0.0;     // mean angle, radians
  double translation = 0.0;  // mean distance, meters
};

struct CalibrationSolution {
  RigidTransform extrinsic_1;       // camera 1 -> end-effector 1
  RigidTransform extrinsic_2;       // camera 2 -> end-effector 2
  double lambda = 1.0;              // model units -> meters
  RigidTransform world_to_base_1;   // scaled model frame -> base 1
  RigidTransform world_to_base_2;   // scaled model frame -> base 2
  RigidTransform base_1_to_base_2;  // base 2 expressed in base 1
  Residuals residuals;
  ClosureSpread spread_1;
  ClosureSpread spread_2;
  std::vector<std::string> warnings;
};

// Averages E_i X P_i(lambda)^-1 over the views of one arm. Every term equals
// the world-to-base transform when the calibration is exact.
RigidTransform RecoverWorldToBase(const CaptureSet& capture,
                                  const RigidTransform& extrinsic,
                                  double lambda,
                                  ClosureSpread* spread = nullptr);

// Diagnostic only: the average of A_i (X B_i(lambda))^-1 over consecutive
// pairs. It is close to the identity at convergence rather than a
// world-to-base transform.
RigidTransform RelativeClosureAverage(const CaptureSet& capture,
                                      const RigidTransform& extrinsic,
                                      double lambda);

// world_to_base_1 * world_to_base_2^-1.
RigidTransform BaseToBase(const RigidTransform& world_to_base_1,
                          const RigidTransform& world_to_base_2);

// Mean rotational and translational discrepancy between A_i X and
// X B_i(lambda), pooled over all pairs of both arms.
Residuals ComputeResiduals(const CalibrationProblem& problem,
                           const RigidTransform& extrinsic_1,
                           const RigidTransform& extrinsic_2, double lambda);
Residuals ComputeResiduals(const CalibrationProblem& problem,
                           const CalibrationSolution& solution);

// Recovers both world-to-base transforms, the base-to-base pose and the
// residual diagnostics for the given extrinsics and scale. Adds a warning
// when a closure spread exceeds five times the matching mean residual.
CalibrationSolution AssembleSolution(const CalibrationProblem& problem,
                                     const RigidTransform& extrinsic_1,
                                     const RigidTransform& extrinsic_2,
                                     double lambda);

}  // namespace bimanual

#endif  // BIMANUAL_FRAME_RECOVERY_H_
