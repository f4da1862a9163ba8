#ifndef BIMANUAL_INIT_SOLVER_H_
#define BIMANUAL_INIT_SOLVER_H_

#include <array>
#include <vector>

#include <Eigen/Core>

#include "bimanual/capture.h"
#include "bimanual/lie.h"

namespace bimanual {

struct InitialSolution {
  RigidTransform extrinsic_1;  // camera 1 -> end-effector 1
  RigidTransform extrinsic_2;  // camera 2 -> end-effector 2
  double lambda = 1.0;         // model units -> meters

  // Singular values of each arm's log-map correlation matrix, descending.
  std::array<Eigen::Vector3d, 2> rotation_singular_values;
  // Smallest singular value of the stacked scale-recovery system.
  double srp_min_singular_value = 0.0;
  // Norm of the stacked scale-recovery residual.
  double srp_residual_norm = 0.0;
};

// Least-squares rotation X with log(A_i) = X log(B_i) for the relative
// end-effector rotations A_i and relative camera rotations B_i.
//
// The correlation M = sum_i log(B_i) log(A_i)^T is decomposed with an SVD and
// X = (M^T M)^{-1/2} M^T is evaluated as its orthogonal polar factor, with the
// determinant forced to +1.
//
// Throws kDegenerate with "degenerate motion: rotation axes span rank < 2"
// when the second singular value of M is below 1e-8.
Rotation SolveRotation(const std::vector<RigidTransform>& rel_ee,
                       const std::vector<RigidTransform>& rel_cam,
                       Eigen::Vector3d* singular_values = nullptr);

// Joint linear least squares over (t_1, t_2, lambda) with both arms sharing
// lambda. Each relative motion contributes three rows
//   (I - R_A) t_m + lambda R_m t_B = t_A.
//
// Throws kDegenerate with "rank-deficient SRP system" when the smallest
// singular value is below 1e-10, and "non-positive scale" when the solved
// lambda is not positive.
InitialSolution SolveScaleTranslation(const CalibrationProblem& problem,
                                      const Rotation& r1, const Rotation& r2);

// SolveRotation on both arms followed by SolveScaleTranslation.
InitialSolution SolveInitial(const CalibrationProblem& problem);

}  // namespace bimanual

#endif  // BIMANUAL_INIT_SOLVER_H_
