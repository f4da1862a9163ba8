#include "bimanual/calibrate.h"

#include <chrono>

namespace bimanual {
namespace {

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

CalibrationRun Calibrate(const CalibrationProblem& problem) {
  problem.options.Validate();
  ValidateCaptureSet(problem.primary);
  ValidateCaptureSet(problem.secondary);

  CalibrationRun run;
  auto start = std::chrono::steady_clock::now();
  run.initial = SolveInitial(problem);
  run.init_seconds = SecondsSince(start);

  RigidTransform x1 = run.initial.extrinsic_1;
  RigidTransform x2 = run.initial.extrinsic_2;
  double lambda = run.initial.lambda;
  if (problem.options.refine_enabled) {
    start = std::chrono::steady_clock::now();
    run.refined = Refine(problem, run.initial, problem.options);
    run.refine_seconds = SecondsSince(start);
    x1 = run.refined->extrinsic_1;
    x2 = run.refined->extrinsic_2;
    lambda = run.refined->lambda;
  }
  run.solution = AssembleSolution(problem, x1, x2, lambda);
  if (run.refined.has_value() && !run.refined->converged) {
    run.solution.warnings.push_back(
        "refinement stopped at the iteration limit before converging");
  }
  return run;
}

}  // namespace bimanual
