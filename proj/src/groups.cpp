#include "invobs/groups.hpp"

#include <cmath>
#include <numbers>

#include "invobs/errors.hpp"

namespace invobs {

double wrap_angle(double a) {
  constexpr double kPi = std::numbers::pi;
  double r = std::remainder(a, 2.0 * kPi);  // in [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  // clang-format off
  s <<    0.0, -v.z(),  v.y(),
        v.z(),    0.0, -v.x(),
       -v.y(),  v.x(),    0.0;
  // clang-format on
  return s;
}

// ---------------------------------------------------------------------------
// SO(3)

SO3::SO3(const Eigen::Quaterniond& q) : q_(q.normalized()) {}

SO3 SO3::exp(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  double half_sinc;  // sin(theta/2) / theta
  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    half_sinc = 0.5 - t2 / 48.0 + t2 * t2 / 3840.0;
  } else {
    half_sinc = std::sin(0.5 * theta) / theta;
  }
  const Eigen::Vector3d v = half_sinc * w;
  return SO3(Eigen::Quaterniond(std::cos(0.5 * theta), v.x(), v.y(), v.z()));
}

Eigen::Vector3d SO3::log() const {
  const Eigen::Quaterniond q = canonical();
  const Eigen::Vector3d v = q.vec();
  const double s = v.norm();
  const double theta = 2.0 * std::atan2(s, q.w());
  if (std::numbers::pi - theta < kCutLocusTol) {
    throw AtCutLocus("SO(3) log: rotation angle " + std::to_string(theta) +
                     " is at the cut locus");
  }
  double factor;  // theta / sin(theta/2)
  if (theta < kSmallAngle) {
    factor = 2.0 + theta * theta / 12.0;
  } else {
    factor = theta / s;
  }
  return factor * v;
}

SO3 SO3::operator*(const SO3& other) const { return SO3(q_ * other.q_); }

SO3 SO3::inverse() const {
  SO3 r;
  r.q_ = q_.conjugate();
  return r;
}

Eigen::Matrix3d SO3::adjoint() const { return matrix().transpose(); }

Eigen::Quaterniond SO3::canonical() const {
  if (q_.w() < 0.0) return Eigen::Quaterniond(-q_.w(), -q_.x(), -q_.y(), -q_.z());
  return q_;
}

double SO3::angle() const {
  const Eigen::Quaterniond q = canonical();
  return 2.0 * std::atan2(q.vec().norm(), q.w());
}

// ---------------------------------------------------------------------------
// SE(2)

namespace {

// sin(a)/a and (1 - cos a)/a with series below kSmallAngle.
void se2_v_factors(double a, double& sa, double& ca) {
  if (std::abs(a) < kSmallAngle) {
    const double a2 = a * a;
    sa = 1.0 - a2 / 6.0 + a2 * a2 / 120.0;
    ca = a / 2.0 - a * a2 / 24.0;
  } else {
    sa = std::sin(a) / a;
    const double sh = std::sin(0.5 * a);
    ca = 2.0 * sh * sh / a;  // 1 - cos(a) without cancellation
  }
}

}  // namespace

SE2::SE2(double theta, const Eigen::Vector2d& t) : theta_(wrap_angle(theta)), t_(t) {}

SE2 SE2::exp(const Eigen::Vector3d& xi) {
  double sa, ca;
  se2_v_factors(xi(0), sa, ca);
  Eigen::Matrix2d v;
  v << sa, -ca, ca, sa;
  return SE2(xi(0), v * xi.tail<2>());
}

Eigen::Vector3d SE2::log() const {
  if (std::numbers::pi - std::abs(theta_) < kCutLocusTol) {
    throw AtCutLocus("SE(2) log: heading " + std::to_string(theta_) + " is at the cut locus");
  }
  const double half = 0.5 * theta_;
  double hc;  // (theta/2) cot(theta/2)
  if (std::abs(theta_) < kSmallAngle) {
    hc = 1.0 - theta_ * theta_ / 12.0;
  } else {
    hc = half * std::cos(half) / std::sin(half);
  }
  Eigen::Matrix2d vinv;
  vinv << hc, half, -half, hc;
  Eigen::Vector3d out;
  out << theta_, vinv * t_;
  return out;
}

SE2 SE2::operator*(const SE2& other) const {
  return SE2(theta_ + other.theta_, rotation() * other.t_ + t_);
}

SE2 SE2::inverse() const { return SE2(-theta_, -(rotation().transpose() * t_)); }

Eigen::Matrix3d SE2::adjoint() const {
  const double c = std::cos(theta_), s = std::sin(theta_);
  const double tx = t_.x(), ty = t_.y();
  Eigen::Matrix3d ad;
  // clang-format off
  ad << 1.0,                0.0, 0.0,
        s * tx - c * ty,    c,   s,
        c * tx + s * ty,   -s,   c;
  // clang-format on
  return ad;
}

Eigen::Matrix2d SE2::rotation() const {
  const double c = std::cos(theta_), s = std::sin(theta_);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

Eigen::Matrix3d SE2::matrix() const {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m.topLeftCorner<2, 2>() = rotation();
  m.topRightCorner<2, 1>() = t_;
  return m;
}

Eigen::Matrix3d R2::matrix() const {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m.topRightCorner<2, 1>() = t_;
  return m;
}

Eigen::Vector3d so3_rotate(const SO3& g, const Eigen::Vector3d& v) { return g.rotate(v); }

Eigen::Vector2d se2_apply(const SE2& g, const Eigen::Vector2d& p) { return g.apply(p); }

}  // namespace invobs
