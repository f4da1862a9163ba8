#ifndef BIMANUAL_CALIBRATE_H_
#define BIMANUAL_CALIBRATE_H_

#include <optional>

#include "bimanual/capture.h"
#include "bimanual/frame_recovery.h"
#include "bimanual/init_solver.h"
#include "bimanual/refine_solver.h"

namespace bimanual {

struct CalibrationRun {
  InitialSolution initial;
  std::optional<RefinedSolution> refined;  // unset with refine disabled
  CalibrationSolution solution;
  double init_seconds = 0.0;
  double refine_seconds = 0.0;
};

// Closed-form initialization, optional refinement, then world-to-base and
// base-to-base recovery, using problem.options.
CalibrationRun Calibrate(const CalibrationProblem& problem);

}  // namespace bimanual

#endif  // BIMANUAL_CALIBRATE_H_
