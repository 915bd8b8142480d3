#include "invobs/system.hpp"

#include <algorithm>
#include <cmath>

#include "invobs/errors.hpp"

namespace invobs {

std::string_view side_name(ActionSide side) {
  return side == ActionSide::kLeft ? "left" : "right";
}

void InvariantSystem::validate() const {
  if (!body_velocity || !input_action || !output_action || !output_at_identity) {
    throw ValidationError("system '" + name + "' is missing one of f_e, psi, rho, h_e");
  }
  if (input_dim <= 0 || output_dim <= 0) {
    throw ValidationError("system '" + name + "' has non-positive input or output dimension");
  }
}

Vector invariants_I(const InvariantSystem& sys, const GroupElement& x, const Vector& u) {
  return sys.input_action(inverse(x), u);
}

AlgebraVector dynamics_rhs(const InvariantSystem& sys, const GroupElement& x, const Vector& u) {
  if (sys.side == ActionSide::kRight) return sys.body_velocity(u);
  return sys.body_velocity(invariants_I(sys, x, u));
}

Vector output(const InvariantSystem& sys, const GroupElement& x, const Vector& u) {
  if (sys.output_override) return sys.output_override(x, u);
  if (sys.side == ActionSide::kRight) return sys.output_action(x, sys.output_at_identity(u));
  return sys.output_action(x, sys.output_at_identity(invariants_I(sys, x, u)));
}

// ---------------------------------------------------------------------------
// InputSignal

InputSignal InputSignal::constant(Vector u) {
  InputSignal s;
  s.dim_ = static_cast<int>(u.size());
  s.times_ = {0.0};
  s.values_ = {std::move(u)};
  return s;
}

InputSignal InputSignal::sampled(std::vector<double> times, std::vector<Vector> values,
                                 Interpolation interp) {
  if (times.empty() || times.size() != values.size()) {
    throw ValidationError("input signal needs matching, non-empty time and value samples");
  }
  for (size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw ValidationError("input signal timestamps must be strictly increasing (sample " +
                            std::to_string(i) + ")");
    }
  }
  const auto dim = values.front().size();
  for (const auto& v : values) {
    if (v.size() != dim) throw ValidationError("input signal samples differ in dimension");
    if (!v.allFinite()) throw ValidationError("input signal sample is not finite");
  }
  InputSignal s;
  s.dim_ = static_cast<int>(dim);
  s.times_ = std::move(times);
  s.values_ = std::move(values);
  s.interp_ = interp;
  return s;
}

InputSignal InputSignal::function(int dim, std::function<Vector(double)> fn) {
  InputSignal s;
  s.dim_ = dim;
  s.fn_ = std::move(fn);
  return s;
}

Vector InputSignal::operator()(double t) const {
  if (fn_) return fn_(t);
  if (t <= times_.front()) return values_.front();
  if (t >= times_.back()) return values_.back();
  // first sample strictly after t
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto hi = static_cast<size_t>(it - times_.begin());
  const size_t lo = hi - 1;
  if (interp_ == Interpolation::kZeroOrderHold) return values_[lo];
  const double a = (t - times_[lo]) / (times_[hi] - times_[lo]);
  return (1.0 - a) * values_[lo] + a * values_[hi];
}

// ---------------------------------------------------------------------------
// Equivariance report

bool EquivarianceReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string EquivarianceReport::first_failure() const {
  for (const auto& c : checks) {
    if (!c.passed) return c.name;
  }
  return {};
}

Vector random_vector(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = normal(rng);
  return v;
}

EquivarianceReport check_equivariance(const InvariantSystem& sys, int samples,
                                      std::uint64_t seed, double tol) {
  sys.validate();
  std::mt19937_64 rng(seed);
  const bool left = sys.side == ActionSide::kLeft;
  // g1 g2 for a left action, g2 g1 for a right one
  auto product = [left](const GroupElement& outer, const GroupElement& inner) {
    return left ? compose(outer, inner) : compose(inner, outer);
  };
  // state transformation x -> g x (left) or x g (right)
  auto transform = [left](const GroupElement& g, const GroupElement& x) {
    return left ? compose(g, x) : compose(x, g);
  };

  double input_law = 0.0, output_law = 0.0, input_id = 0.0, output_id = 0.0;
  double dyn = 0.0, out = 0.0, inv = 0.0;
  auto upd = [](double& acc, const Vector& a, const Vector& b) {
    const double d = (a - b).cwiseAbs().maxCoeff();
    acc = std::isfinite(d) ? std::max(acc, d) : INFINITY;
  };

  const GroupElement e = GroupElement::identity(sys.group);
  for (int s = 0; s < samples; ++s) {
    const GroupElement g1 = random_element(sys.group, rng);
    const GroupElement g2 = random_element(sys.group, rng);
    const GroupElement x = random_element(sys.group, rng);
    const Vector u = random_vector(sys.input_dim, rng);
    const Vector y = random_vector(sys.output_dim, rng);

    upd(input_id, sys.input_action(e, u), u);
    upd(output_id, sys.output_action(e, y), y);
    upd(input_law, sys.input_action(g2, sys.input_action(g1, u)),
        sys.input_action(product(g2, g1), u));
    upd(output_law, sys.output_action(g2, sys.output_action(g1, y)),
        sys.output_action(product(g2, g1), y));

    const GroupElement gx = transform(g1, x);
    const Vector gu = sys.input_action(g1, u);
    // left: DL_g f(x,u) = f(gx, psi_g u), body velocities equal.
    // right: DR_g f(x,u) = f(xg, psi_g u), body velocity picks up adjoint(g).
    const AlgebraVector body = dynamics_rhs(sys, x, u);
    const AlgebraVector body_t = dynamics_rhs(sys, gx, gu);
    upd(dyn, body_t, left ? body : AlgebraVector(adjoint(g1) * body));
    upd(out, output(sys, gx, gu), sys.output_action(g1, output(sys, x, u)));
    upd(inv, invariants_I(sys, gx, gu), invariants_I(sys, x, u));
  }

  EquivarianceReport rep;
  rep.tolerance = tol;
  auto add = [&](std::string name, double dev) {
    rep.checks.push_back({std::move(name), dev, dev < tol});
  };
  add("input action identity", input_id);
  add("output action identity", output_id);
  add(std::string(side_name(sys.side)) + " input action composition", input_law);
  add(std::string(side_name(sys.side)) + " output action composition", output_law);
  add("dynamics invariance", dyn);
  add("output equivariance", out);
  add("invariant input I", inv);
  return rep;
}

}  // namespace invobs
