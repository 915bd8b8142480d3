#pragma once

// Permanent trajectories: trajectories along which the invariant input
// I(x(t), u(t)) stays equal to a constant u-bar. They are left translates of
// one-parameter subgroups, x(t) = x0 exp(t wbar).

#include <vector>

#include "invobs/system.hpp"

namespace invobs {

inline constexpr double kPermanenceTol = 1e-8;

struct PermanentTrajectory {
  GroupElement x0;
  Vector ubar;
  AlgebraVector wbar;  // constant body velocity
  double duration = 0.0;
};

/// wbar = f_e(u-bar) for left systems; for right systems the body velocity
/// is f_e(psi_{x0}(u-bar)).
PermanentTrajectory make_permanent(const InvariantSystem& sys, const GroupElement& x0,
                                   const Vector& ubar, double duration);

/// x0 exp(t wbar).
GroupElement permanent_state(const PermanentTrajectory& traj, double t);

/// u(t) = psi_{x(t)}(u-bar), so that I(x(t), u(t)) = u-bar.
Vector required_input(const InvariantSystem& sys, const PermanentTrajectory& traj, double t);

struct PermanenceVerdict {
  bool permanent = false;
  double max_deviation = 0.0;
};

/// max_k |I(x_k, u(t_k)) - I(x_0, u(t_0))|_inf < tol.
PermanenceVerdict is_permanent(const InvariantSystem& sys, const std::vector<double>& times,
                               const std::vector<GroupElement>& states, const InputSignal& inputs,
                               double tol = kPermanenceTol);

}  // namespace invobs
