#pragma once

// Reference computations that share no code with the library.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

/// Truncated power series sum_{k<terms} M^k / k!.
inline Eigen::Matrix3d expm_series(const Eigen::Matrix3d& m, int terms = 20) {
  Eigen::Matrix3d sum = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d term = Eigen::Matrix3d::Identity();
  for (int k = 1; k < terms; ++k) {
    term = term * m / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

/// Same series with scaling and squaring, for larger arguments.
inline Eigen::MatrixXd expm_scaled(const Eigen::MatrixXd& m, int terms = 30) {
  int s = 0;
  double norm = m.norm();
  while (norm > 0.5) {
    norm /= 2.0;
    ++s;
  }
  const Eigen::MatrixXd a = m / std::pow(2.0, s);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(m.rows(), m.cols());
  Eigen::MatrixXd term = sum;
  for (int k = 1; k < terms; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

inline Eigen::Matrix3d so3_hat(const Eigen::Vector3d& w) {
  Eigen::Matrix3d m;
  m << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  return m;
}

/// Homogeneous se(2) element for coordinates (omega, vx, vy).
inline Eigen::Matrix3d se2_hat(const Eigen::Vector3d& xi) {
  Eigen::Matrix3d m;
  m << 0, -xi(0), xi(1), xi(0), 0, xi(2), 0, 0, 0;
  return m;
}

/// Hamilton product written out component by component, (w, x, y, z).
inline Eigen::Vector4d hamilton(const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
  return {a(0) * b(0) - a(1) * b(1) - a(2) * b(2) - a(3) * b(3),
          a(0) * b(1) + a(1) * b(0) + a(2) * b(3) - a(3) * b(2),
          a(0) * b(2) - a(1) * b(3) + a(2) * b(0) + a(3) * b(1),
          a(0) * b(3) + a(1) * b(2) - a(2) * b(1) + a(3) * b(0)};
}

/// Rotation matrix of a unit quaternion (w, x, y, z), expanded by hand.
inline Eigen::Matrix3d quat_matrix(const Eigen::Vector4d& q) {
  const double w = q(0), x = q(1), y = q(2), z = q(3);
  Eigen::Matrix3d r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

/// Rank by full-pivot LU with a relative threshold.
inline int rank(const Eigen::MatrixXd& m, double rel = 1e-9) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(rel);
  return static_cast<int>(lu.rank());
}

/// Observability matrix [C; CA; ...; CA^{n-1}] built independently.
inline Eigen::MatrixXd obsv(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c) {
  const auto n = a.rows();
  Eigen::MatrixXd o(c.rows() * n, n);
  Eigen::MatrixXd block = c;
  for (Eigen::Index k = 0; k < n; ++k) {
    o.middleRows(k * c.rows(), c.rows()) = block;
    block = block * a;
  }
  return o;
}

/// Characteristic polynomial value det(zI - M) at z.
inline std::complex<double> charpoly(const Eigen::MatrixXd& m, std::complex<double> z) {
  Eigen::MatrixXcd a = -m.cast<std::complex<double>>();
  a.diagonal().array() += z;
  return a.determinant();
}

}  // namespace oracle
