#pragma once

// Concrete matrix Lie groups with closed-form exp, log and adjoint.
//
// Basis conventions (fixed, immutable):
//   SO(3): (rot-x, rot-y, rot-z), so(3) coordinates are the rotation vector.
//   SE(2): (rot, trans-x, trans-y), coordinates (omega, vx, vy).
//   R^2:   (trans-x, trans-y), the abelian test group.
//
// Every group also has a 3x3 matrix representation, used by the generic
// bracket / structure-constant code and by the test oracles.

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace invobs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Angles below this use series expansions of the sinc-type factors.
inline constexpr double kSmallAngle = 1e-4;
/// log() refuses rotation angles within this distance of pi.
inline constexpr double kCutLocusTol = 1e-6;

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

Eigen::Matrix3d skew(const Eigen::Vector3d& v);

/// Unit quaternion representing a rotation. The quaternion is renormalized
/// after every composition. The sign of the scalar part is left alone so
/// flows stay continuous; `canonical()` picks w >= 0 for comparisons.
class SO3 {
 public:
  static constexpr int kDim = 3;

  SO3() : q_(Eigen::Quaterniond::Identity()) {}
  explicit SO3(const Eigen::Quaterniond& q);

  static SO3 exp(const Eigen::Vector3d& w);
  /// Principal-branch rotation vector; throws AtCutLocus near angle pi.
  Eigen::Vector3d log() const;

  SO3 operator*(const SO3& other) const;
  SO3 inverse() const;

  /// Matrix of xi -> g^-1 xi g, i.e. R^T.
  Eigen::Matrix3d adjoint() const;
  Eigen::Matrix3d matrix() const { return q_.toRotationMatrix(); }
  Eigen::Vector3d rotate(const Eigen::Vector3d& v) const { return q_ * v; }

  const Eigen::Quaterniond& quaternion() const { return q_; }
  Eigen::Quaterniond canonical() const;
  double angle() const;

 private:
  Eigen::Quaterniond q_;
};

/// Planar rigid motion (theta, t) acting as p -> R(theta) p + t.
class SE2 {
 public:
  static constexpr int kDim = 3;

  SE2() : theta_(0.0), t_(Eigen::Vector2d::Zero()) {}
  SE2(double theta, const Eigen::Vector2d& t);

  static SE2 exp(const Eigen::Vector3d& xi);
  Eigen::Vector3d log() const;

  SE2 operator*(const SE2& other) const;
  SE2 inverse() const;

  Eigen::Matrix3d adjoint() const;
  Eigen::Matrix3d matrix() const;
  Eigen::Matrix2d rotation() const;
  Eigen::Vector2d apply(const Eigen::Vector2d& p) const { return rotation() * p + t_; }

  double theta() const { return theta_; }
  const Eigen::Vector2d& translation() const { return t_; }

 private:
  double theta_;
  Eigen::Vector2d t_;
};

/// Translations of the plane. Abelian; all brackets vanish.
class R2 {
 public:
  static constexpr int kDim = 2;

  R2() : t_(Eigen::Vector2d::Zero()) {}
  explicit R2(const Eigen::Vector2d& t) : t_(t) {}

  static R2 exp(const Eigen::Vector2d& xi) { return R2(xi); }
  Eigen::Vector2d log() const { return t_; }

  R2 operator*(const R2& other) const { return R2(t_ + other.t_); }
  R2 inverse() const { return R2(-t_); }

  Eigen::Matrix2d adjoint() const { return Eigen::Matrix2d::Identity(); }
  Eigen::Matrix3d matrix() const;

  const Eigen::Vector2d& translation() const { return t_; }

 private:
  Eigen::Vector2d t_;
};

/// Rotation of v by g.
Eigen::Vector3d so3_rotate(const SO3& g, const Eigen::Vector3d& v);
/// R(theta) p + t.
Eigen::Vector2d se2_apply(const SE2& g, const Eigen::Vector2d& p);

}  // namespace invobs
