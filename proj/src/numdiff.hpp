#pragma once

#include <functional>

#include "invobs/groups.hpp"

namespace invobs::detail {

inline constexpr double kJacobianStep = 1e-6;

/// Central-difference Jacobian of fn at x0.
inline Matrix central_jacobian(const std::function<Vector(const Vector&)>& fn, const Vector& x0,
                               double step = kJacobianStep) {
  const Vector f0 = fn(x0);
  Matrix jac(f0.size(), x0.size());
  for (int j = 0; j < x0.size(); ++j) {
    Vector xp = x0, xm = x0;
    xp(j) += step;
    xm(j) -= step;
    jac.col(j) = (fn(xp) - fn(xm)) / (2.0 * step);
  }
  return jac;
}

}  // namespace invobs::detail
