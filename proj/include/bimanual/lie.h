#ifndef BIMANUAL_LIE_H_
#define BIMANUAL_LIE_H_

#include <span>
#include <vector>

#include <Eigen/Core>

namespace bimanual {

// Maximum absolute entry of R^T R - I.
double OrthonormalityError(const Eigen::Matrix3d& m);

// Element of SO(3). Every instance satisfies R^T R = I and det R = +1 to
// within kRotationTolerance; the factories enforce this.
class Rotation {
 public:
  static constexpr double kRotationTolerance = 1e-9;

  Rotation() : matrix_(Eigen::Matrix3d::Identity()) {}

  // Accepts matrices already within kRotationTolerance of SO(3), unchanged.
  // Throws kInvalidInput otherwise.
  static Rotation FromMatrix(const Eigen::Matrix3d& m);

  // Accepts matrices within `tolerance` of SO(3). Inputs that already meet
  // kRotationTolerance are kept bit-exact; the rest are replaced by their
  // orthogonal polar factor.
  static Rotation FromNearlyOrthonormal(const Eigen::Matrix3d& m,
                                        double tolerance);

  // Closest rotation in Frobenius norm (orthogonal polar factor with the
  // sign of the smallest singular direction chosen so that det = +1).
  static Rotation Nearest(const Eigen::Matrix3d& m);

  static Rotation Exp(const Eigen::Vector3d& axis_angle);
  Eigen::Vector3d Log() const;

  // Rotation angle in [0, pi].
  double Angle() const;

  const Eigen::Matrix3d& matrix() const { return matrix_; }

  Rotation Inverse() const { return Rotation(matrix_.transpose()); }
  Rotation operator*(const Rotation& other) const;
  Eigen::Vector3d operator*(const Eigen::Vector3d& v) const {
    return matrix_ * v;
  }

 private:
  explicit Rotation(const Eigen::Matrix3d& m) : matrix_(m) {}

  Eigen::Matrix3d matrix_;
};

// so(3) log map. Angle of the result lies in [0, pi]. Near the identity the
// first-order limit 0.5 * vee(R - R^T) is used; within 1e-6 of pi the axis is
// recovered from the symmetric part.
Eigen::Vector3d LogMapSO3(const Rotation& r);

// Rodrigues' formula; Taylor coefficients below 1e-8 rad.
Rotation ExpMapSO3(const Eigen::Vector3d& v);

// Angle of a^T b, in [0, pi].
double GeodesicDistance(const Rotation& a, const Rotation& b);

Eigen::Matrix3d Skew(const Eigen::Vector3d& v);

// Element of SE(3): x -> R x + t.
class RigidTransform {
 public:
  RigidTransform() : translation_(Eigen::Vector3d::Zero()) {}
  RigidTransform(const Rotation& rotation, const Eigen::Vector3d& translation)
      : rotation_(rotation), translation_(translation) {}

  static RigidTransform Identity() { return RigidTransform(); }
  static RigidTransform FromTranslation(const Eigen::Vector3d& t) {
    return RigidTransform(Rotation(), t);
  }

  // Validates the bottom row and the rotation block (kRotationTolerance).
  static RigidTransform FromMatrix(const Eigen::Matrix4d& m);

  const Rotation& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  Eigen::Matrix4d Matrix() const;

  RigidTransform Inverse() const;
  RigidTransform operator*(const RigidTransform& other) const;
  Eigen::Vector3d operator*(const Eigen::Vector3d& point) const {
    return rotation_ * point + translation_;
  }

 private:
  Rotation rotation_;
  Eigen::Vector3d translation_;
};

inline RigidTransform Compose(const RigidTransform& a,
                              const RigidTransform& b) {
  return a * b;
}

inline RigidTransform Inverse(const RigidTransform& t) { return t.Inverse(); }

// Translation: arithmetic mean. Rotation: chordal mean, i.e. the projection
// of the arithmetic mean matrix onto SO(3). Sums are accumulated per entry
// in sorted order with compensation, so the result does not depend on the
// order of `transforms`.
//
// Throws kInvalidInput on an empty list and kDegenerate when the mean
// matrix is too close to rank deficient to project reliably.
RigidTransform AverageSE3(std::span<const RigidTransform> transforms);

// Order-independent compensated sum; `values` is sorted in place.
double CanonicalSum(std::vector<double>& values);

}  // namespace bimanual

#endif  // BIMANUAL_LIE_H_
