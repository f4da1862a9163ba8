#include "bimanual/lie.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "bimanual/error.h"

namespace bimanual {
namespace {

constexpr double kPi = std::numbers::pi;

// Below this angle the log map uses its first-order limit.
constexpr double kLogSmallAngle = 1e-7;
// Within this distance of pi the axis comes from the symmetric part.
constexpr double kLogNearPi = 1e-6;
constexpr double kExpSmallAngle = 1e-8;

Eigen::Vector3d Vee(const Eigen::Matrix3d& r) {
  return Eigen::Vector3d(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0),
                         r(1, 0) - r(0, 1));
}

// Angle from both trace and skew part; agrees with the clamped
// arccos((tr - 1) / 2) but keeps full precision near 0 and pi.
double AngleOf(const Eigen::Matrix3d& r) {
  const double c = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
  const double s = 0.5 * Vee(r).norm();
  return std::atan2(s, c);
}

}  // namespace

double OrthonormalityError(const Eigen::Matrix3d& m) {
  return (m.transpose() * m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

Rotation Rotation::FromMatrix(const Eigen::Matrix3d& m) {
  if (!m.allFinite() || OrthonormalityError(m) > kRotationTolerance ||
      std::abs(m.determinant() - 1.0) > kRotationTolerance) {
    std::ostringstream msg;
    msg << "not a rotation matrix (orthonormality error "
        << OrthonormalityError(m) << ", det " << m.determinant() << ")";
    throw Error(ErrorKind::kInvalidInput, msg.str());
  }
  return Rotation(m);
}

Rotation Rotation::FromNearlyOrthonormal(const Eigen::Matrix3d& m,
                                         double tolerance) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::kInvalidInput, "non-finite rotation matrix");
  }
  const double ortho = OrthonormalityError(m);
  const double det = m.determinant();
  if (ortho > tolerance || std::abs(det - 1.0) > tolerance) {
    std::ostringstream msg;
    msg << "non-rigid rotation (orthonormality error " << ortho << ", det "
        << det << ")";
    throw Error(ErrorKind::kInvalidInput, msg.str());
  }
  if (ortho <= kRotationTolerance &&
      std::abs(det - 1.0) <= kRotationTolerance) {
    return Rotation(m);
  }
  return Nearest(m);
}

Rotation Rotation::Nearest(const Eigen::Matrix3d& m) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::kNumerical, "non-finite matrix in projection");
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0
                ? -1.0
                : 1.0;
  return Rotation(svd.matrixU() * d * svd.matrixV().transpose());
}

Rotation Rotation::Exp(const Eigen::Vector3d& axis_angle) {
  return ExpMapSO3(axis_angle);
}

Eigen::Vector3d Rotation::Log() const { return LogMapSO3(*this); }

double Rotation::Angle() const { return AngleOf(matrix_); }

Rotation Rotation::operator*(const Rotation& other) const {
  const Eigen::Matrix3d product = matrix_ * other.matrix_;
  if (OrthonormalityError(product) > kRotationTolerance) {
    return Nearest(product);
  }
  return Rotation(product);
}

Eigen::Matrix3d Skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d k;
  k << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return k;
}

Eigen::Vector3d LogMapSO3(const Rotation& rotation) {
  const Eigen::Matrix3d& r = rotation.matrix();
  const Eigen::Vector3d vee = Vee(r);
  const double angle = AngleOf(r);

  if (angle < kLogSmallAngle) {
    return 0.5 * vee;
  }
  if (kPi - angle < kLogNearPi) {
    // Symmetric part is cos(a) I + (1 - cos(a)) n n^T.
    const double c = std::cos(angle);
    const Eigen::Matrix3d nnt =
        (0.5 * (r + r.transpose()) - c * Eigen::Matrix3d::Identity()) /
        (1.0 - c);
    Eigen::Index k = 0;
    nnt.diagonal().maxCoeff(&k);
    Eigen::Vector3d axis = nnt.col(k) / std::sqrt(std::max(nnt(k, k), 0.0));
    axis.normalize();
    // vee = 2 sin(a) n, so its sign picks between n and -n.
    if (axis.dot(vee) < 0.0) {
      axis = -axis;
    }
    return angle * axis;
  }
  return (angle / (2.0 * std::sin(angle))) * vee;
}

Rotation ExpMapSO3(const Eigen::Vector3d& v) {
  const double theta2 = v.squaredNorm();
  const double theta = std::sqrt(theta2);
  double a = 0.0;  // sin(t) / t
  double b = 0.0;  // (1 - cos(t)) / t^2
  if (theta < kExpSmallAngle) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  const Eigen::Matrix3d k = Skew(v);
  return Rotation::FromMatrix(Eigen::Matrix3d::Identity() + a * k +
                              b * (k * k));
}

double GeodesicDistance(const Rotation& a, const Rotation& b) {
  return AngleOf(a.matrix().transpose() * b.matrix());
}

RigidTransform RigidTransform::FromMatrix(const Eigen::Matrix4d& m) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::kInvalidInput, "non-finite transform");
  }
  if (m(3, 0) != 0.0 || m(3, 1) != 0.0 || m(3, 2) != 0.0 || m(3, 3) != 1.0) {
    throw Error(ErrorKind::kInvalidInput,
                "transform bottom row is not [0 0 0 1]");
  }
  return RigidTransform(Rotation::FromMatrix(m.topLeftCorner<3, 3>()),
                        m.topRightCorner<3, 1>());
}

Eigen::Matrix4d RigidTransform::Matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_.matrix();
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

RigidTransform RigidTransform::Inverse() const {
  const Rotation r_inv = rotation_.Inverse();
  return RigidTransform(r_inv, -(r_inv * translation_));
}

RigidTransform RigidTransform::operator*(const RigidTransform& other) const {
  return RigidTransform(rotation_ * other.rotation_,
                        rotation_ * other.translation_ + translation_);
}

double CanonicalSum(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  // Neumaier's variant of Kahan summation.
  double sum = 0.0;
  double compensation = 0.0;
  for (const double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      compensation += (sum - t) + v;
    } else {
      compensation += (v - t) + sum;
    }
    sum = t;
  }
  return sum + compensation;
}

RigidTransform AverageSE3(std::span<const RigidTransform> transforms) {
  if (transforms.empty()) {
    throw Error(ErrorKind::kInvalidInput, "empty average");
  }
  if (transforms.size() == 1) {
    return transforms.front();
  }
  const double n = static_cast<double>(transforms.size());
  std::vector<double> column(transforms.size());

  Eigen::Vector3d mean_t;
  for (int k = 0; k < 3; ++k) {
    for (size_t i = 0; i < transforms.size(); ++i) {
      column[i] = transforms[i].translation()(k);
    }
    mean_t(k) = CanonicalSum(column) / n;
  }

  Eigen::Matrix3d mean_r;
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) {
      for (size_t i = 0; i < transforms.size(); ++i) {
        column[i] = transforms[i].rotation().matrix()(row, col);
      }
      mean_r(row, col) = CanonicalSum(column) / n;
    }
  }

  const Eigen::Vector3d sigma =
      Eigen::JacobiSVD<Eigen::Matrix3d>(mean_r).singularValues();
  if (sigma(2) < 1e-6 || mean_r.determinant() <= 0.0) {
    throw Error(ErrorKind::kDegenerate, "ill-conditioned rotation average");
  }
  return RigidTransform(Rotation::Nearest(mean_r), mean_t);
}

}  // namespace bimanual
