#include "invobs/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "invobs/errors.hpp"

namespace invobs {

PermanentTrajectory make_permanent(const InvariantSystem& sys, const GroupElement& x0,
                                   const Vector& ubar, double duration) {
  sys.validate();
  if (x0.kind() != sys.group) throw GroupMismatch("initial state is not on the system group");
  if (ubar.size() != sys.input_dim) throw ValidationError("u-bar has the wrong dimension");
  if (!(duration >= 0.0)) throw ValidationError("duration must be non-negative");
  AlgebraVector wbar = sys.side == ActionSide::kLeft
                           ? sys.body_velocity(ubar)
                           : dynamics_rhs(sys, x0, sys.input_action(x0, ubar));
  return {x0, ubar, std::move(wbar), duration};
}

GroupElement permanent_state(const PermanentTrajectory& traj, double t) {
  return compose(traj.x0, exp(traj.x0.kind(), t * traj.wbar));
}

Vector required_input(const InvariantSystem& sys, const PermanentTrajectory& traj, double t) {
  return sys.input_action(permanent_state(traj, t), traj.ubar);
}

PermanenceVerdict is_permanent(const InvariantSystem& sys, const std::vector<double>& times,
                               const std::vector<GroupElement>& states, const InputSignal& inputs,
                               double tol) {
  if (times.size() != states.size()) {
    throw ValidationError("state and time samples are not aligned");
  }
  PermanenceVerdict v;
  if (states.empty()) {
    v.permanent = true;
    return v;
  }
  const Vector ref = invariants_I(sys, states.front(), inputs(times.front()));
  for (size_t k = 1; k < states.size(); ++k) {
    const double d = (invariants_I(sys, states[k], inputs(times[k])) - ref).cwiseAbs().maxCoeff();
    v.max_deviation = std::isfinite(d) ? std::max(v.max_deviation, d) : INFINITY;
  }
  v.permanent = v.max_deviation < tol;
  return v;
}

}  // namespace invobs
