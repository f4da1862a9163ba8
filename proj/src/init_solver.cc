#include "bimanual/init_solver.h"

#include <cmath>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "bimanual/error.h"

namespace bimanual {
namespace {

constexpr double kRotationRankTolerance = 1e-8;
constexpr double kSrpRankTolerance = 1e-10;

}  // namespace

Rotation SolveRotation(const std::vector<RigidTransform>& rel_ee,
                       const std::vector<RigidTransform>& rel_cam,
                       Eigen::Vector3d* singular_values) {
  if (rel_ee.size() != rel_cam.size()) {
    throw Error(ErrorKind::kInvalidInput, "length mismatch");
  }
  if (rel_ee.empty()) {
    throw Error(ErrorKind::kDegenerate,
                "degenerate motion: rotation axes span rank < 2");
  }

  std::vector<Eigen::Vector3d> alpha(rel_ee.size());
  std::vector<Eigen::Vector3d> beta(rel_ee.size());
  for (size_t i = 0; i < rel_ee.size(); ++i) {
    alpha[i] = LogMapSO3(rel_ee[i].rotation());
    beta[i] = LogMapSO3(rel_cam[i].rotation());
  }

  // Entry-wise canonical sums keep M independent of the pair order.
  Eigen::Matrix3d m;
  std::vector<double> terms(rel_ee.size());
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      for (size_t i = 0; i < rel_ee.size(); ++i) {
        terms[i] = beta[i](r) * alpha[i](c);
      }
      m(r, c) = CanonicalSum(terms);
    }
  }

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sigma = svd.singularValues();
  if (singular_values != nullptr) {
    *singular_values = sigma;
  }
  if (!sigma.allFinite() || sigma(1) < kRotationRankTolerance) {
    throw Error(ErrorKind::kDegenerate,
                "degenerate motion: rotation axes span rank < 2");
  }
  // M = U S V^T gives (M^T M)^{-1/2} M^T = V U^T. Flipping the weakest
  // direction keeps the result a proper rotation and also resolves the
  // rank-2 case exactly.
  const Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((v * u.transpose()).determinant() < 0.0) {
    d(2, 2) = -1.0;
  }
  return Rotation::Nearest(v * d * u.transpose());
}

InitialSolution SolveScaleTranslation(const CalibrationProblem& problem,
                                      const Rotation& r1, const Rotation& r2) {
  const std::array<const Rotation*, 2> rotations = {&r1, &r2};
  std::array<std::vector<RigidTransform>, 2> rel_ee;
  std::array<std::vector<RigidTransform>, 2> rel_cam;
  size_t rows = 0;
  for (int a = 0; a < 2; ++a) {
    rel_ee[a] = RelativeEe(problem.arm(a));
    rel_cam[a] = RelativeCam(problem.arm(a), 1.0);
    rows += 3 * rel_ee[a].size();
  }

  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), 7);
  Eigen::VectorXd target(static_cast<Eigen::Index>(rows));
  Eigen::Index row = 0;
  for (int a = 0; a < 2; ++a) {
    for (size_t i = 0; i < rel_ee[a].size(); ++i) {
      const RigidTransform& ee = rel_ee[a][i];
      design.block<3, 3>(row, 3 * a) =
          Eigen::Matrix3d::Identity() - ee.rotation().matrix();
      design.block<3, 1>(row, 6) = *rotations[a] * rel_cam[a][i].translation();
      target.segment<3>(row) = ee.translation();
      row += 3;
    }
  }

  // Each arm's translation block must be observable on its own.
  for (int a = 0; a < 2; ++a) {
    const Eigen::MatrixXd block = design.block(
        a == 0 ? 0 : 3 * static_cast<Eigen::Index>(rel_ee[0].size()), 3 * a,
        3 * static_cast<Eigen::Index>(rel_ee[a].size()), 3);
    const Eigen::VectorXd block_sigma =
        Eigen::JacobiSVD<Eigen::MatrixXd>(block).singularValues();
    if (!block_sigma.allFinite() ||
        block_sigma(block_sigma.size() - 1) < kSrpRankTolerance) {
      throw Error(ErrorKind::kDegenerate,
                  "rank-deficient SRP system (arm " + std::to_string(a + 1) +
                      " block)");
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  InitialSolution solution;
  solution.srp_min_singular_value = sigma(sigma.size() - 1);
  if (!sigma.allFinite() || solution.srp_min_singular_value < kSrpRankTolerance) {
    throw Error(ErrorKind::kDegenerate, "rank-deficient SRP system");
  }
  const Eigen::VectorXd x = svd.solve(target);
  solution.srp_residual_norm = (design * x - target).norm();
  solution.lambda = x(6);
  if (!std::isfinite(solution.lambda) || solution.lambda <= 0.0) {
    throw Error(ErrorKind::kDegenerate, "non-positive scale");
  }
  solution.extrinsic_1 = RigidTransform(r1, x.segment<3>(0));
  solution.extrinsic_2 = RigidTransform(r2, x.segment<3>(3));
  return solution;
}

InitialSolution SolveInitial(const CalibrationProblem& problem) {
  std::array<Rotation, 2> rotations;
  std::array<Eigen::Vector3d, 2> sigmas;
  for (int a = 0; a < 2; ++a) {
    ValidateCaptureSet(problem.arm(a));
    rotations[a] = SolveRotation(RelativeEe(problem.arm(a)),
                                 RelativeCam(problem.arm(a), 1.0), &sigmas[a]);
  }
  InitialSolution solution =
      SolveScaleTranslation(problem, rotations[0], rotations[1]);
  solution.rotation_singular_values = sigmas;
  return solution;
}

}  // namespace bimanual
