#ifndef BIMANUAL_REFINE_SOLVER_H_
#define BIMANUAL_REFINE_SOLVER_H_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "bimanual/capture.h"
#include "bimanual/init_solver.h"
#include "bimanual/lie.h"

namespace bimanual {

// Tangent parameterization used by the refinement:
//   [axis-angle 1 (3), t_1 (3), axis-angle 2 (3), t_2 (3), log lambda (1)].
inline constexpr int kNumParameters = 13;
using ParameterVector = Eigen::Matrix<double, kNumParameters, 1>;

ParameterVector PackParameters(const RigidTransform& x1,
                               const RigidTransform& x2, double lambda);
void UnpackParameters(const ParameterVector& params, RigidTransform* x1,
                      RigidTransform* x2, double* lambda);

// Sum over both arms of the per-arm mean of
//   alpha * angle(R_A R_X, R_X R_B) + (1 - alpha) * |t_L - t_R|,
// where A X and X B(lambda) are the two sides of each hand-eye equation.
double Cost(const CalibrationProblem& problem, double lambda,
            const RigidTransform& x1, const RigidTransform& x2, double alpha);
double Cost(const CalibrationProblem& problem, const ParameterVector& params,
            double alpha);

// Gradient of Cost with respect to the tangent parameterization, computed by
// forward-mode differentiation. Residual norms below 1e-12 contribute a zero
// subgradient.
ParameterVector Gradient(const CalibrationProblem& problem,
                         const ParameterVector& params, double alpha);

struct CostSample {
  int iteration = 0;
  double cost = 0.0;
};

struct RefinedSolution {
  RigidTransform extrinsic_1;
  RigidTransform extrinsic_2;
  double lambda = 1.0;
  // Iteration 0 is the warm start; one entry per accepted step after that.
  std::vector<CostSample> cost_trace;
  bool converged = false;
  int iterations_used = 0;
  std::string stop_reason;
};

// Steepest descent with Armijo backtracking (c = 1e-4, shrink 0.5, initial
// step opts.gd_step). Rotations are updated on their axis-angle vectors and
// mapped back through the exponential map; lambda is updated in log space.
//
// Throws kNumerical with "non-finite cost during refinement" when the warm
// start does not evaluate to a finite cost.
RefinedSolution Refine(const CalibrationProblem& problem,
                       const InitialSolution& init, const SolverOptions& opts);

}  // namespace bimanual

#endif  // BIMANUAL_REFINE_SOLVER_H_
