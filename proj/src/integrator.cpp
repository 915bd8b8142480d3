#include "invobs/integrator.hpp"

#include <cmath>
#include <random>
#include <string>

#include "invobs/errors.hpp"

namespace invobs {

std::string_view method_name(Method m) { return m == Method::kLieEuler ? "lie-euler" : "rkmk4"; }

Method parse_method(std::string_view name) {
  if (name == "lie-euler") return Method::kLieEuler;
  if (name == "rkmk4") return Method::kRkmk4;
  throw ValidationError("unknown integration method '" + std::string(name) + "'");
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive and finite");
}

namespace {

GroupElement renormalized(const GroupElement& x) {
  return GroupElement::from_params(x.kind(), x.params());
}

void require_finite(const GroupVelocity& v) {
  if (!v.body.allFinite() || !v.spatial.allFinite()) {
    throw StepRejected("vector field evaluated to a non-finite value");
  }
}

// Theta-dot = dexp^-1_{-Theta}(w) for x = x_n exp(Theta).
AlgebraVector dexpinv(GroupKind kind, const AlgebraVector& theta, const AlgebraVector& w) {
  const AlgebraVector b1 = bracket(kind, theta, w);
  return w + 0.5 * b1 + bracket(kind, theta, b1) / 12.0;
}

std::vector<AlgebraVector> body_velocities(const ProductField& rhs, double t,
                                           const std::vector<GroupElement>& xs) {
  const auto vs = rhs(t, xs);
  if (vs.size() != xs.size()) throw StepRejected("vector field returned the wrong arity");
  std::vector<AlgebraVector> out;
  out.reserve(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    require_finite(vs[i]);
    out.push_back(vs[i].body_at(xs[i]));
  }
  return out;
}

std::vector<GroupElement> shifted(const std::vector<GroupElement>& xs,
                                  const std::vector<AlgebraVector>& thetas) {
  std::vector<GroupElement> out;
  out.reserve(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) out.push_back(compose(xs[i], exp(xs[i].kind(), thetas[i])));
  return out;
}

}  // namespace

std::vector<GroupElement> step_product(const std::vector<GroupElement>& xs,
                                       const ProductField& rhs, double t,
                                       const IntegratorConfig& cfg) {
  const double h = cfg.dt;
  std::vector<GroupElement> next;
  next.reserve(xs.size());

  if (cfg.method == Method::kLieEuler) {
    const auto vs = rhs(t, xs);
    if (vs.size() != xs.size()) throw StepRejected("vector field returned the wrong arity");
    for (size_t i = 0; i < xs.size(); ++i) {
      require_finite(vs[i]);
      const GroupKind kind = xs[i].kind();
      GroupElement x = compose(xs[i], exp(kind, h * vs[i].body));
      if (!vs[i].spatial.isZero(0.0)) x = compose(exp(kind, h * vs[i].spatial), x);
      next.push_back(cfg.renormalize ? renormalized(x) : x);
    }
    return next;
  }

  const size_t m = xs.size();
  std::vector<AlgebraVector> k1 = body_velocities(rhs, t, xs);
  std::vector<AlgebraVector> theta(m);
  for (size_t i = 0; i < m; ++i) {
    k1[i] *= h;
    theta[i] = 0.5 * k1[i];
  }
  std::vector<AlgebraVector> k2 = body_velocities(rhs, t + 0.5 * h, shifted(xs, theta));
  for (size_t i = 0; i < m; ++i) {
    k2[i] = h * dexpinv(xs[i].kind(), theta[i], k2[i]);
    theta[i] = 0.5 * k2[i];
  }
  std::vector<AlgebraVector> k3 = body_velocities(rhs, t + 0.5 * h, shifted(xs, theta));
  for (size_t i = 0; i < m; ++i) {
    k3[i] = h * dexpinv(xs[i].kind(), theta[i], k3[i]);
    theta[i] = k3[i];
  }
  std::vector<AlgebraVector> k4 = body_velocities(rhs, t + h, shifted(xs, theta));
  for (size_t i = 0; i < m; ++i) {
    k4[i] = h * dexpinv(xs[i].kind(), theta[i], k4[i]);
    const AlgebraVector step = (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
    const GroupElement x = compose(xs[i], exp(xs[i].kind(), step));
    next.push_back(cfg.renormalize ? renormalized(x) : x);
  }
  return next;
}

GroupElement step_group(const GroupElement& x, const VectorField& rhs, double t,
                        const IntegratorConfig& cfg) {
  const ProductField field = [&rhs](double s, const std::vector<GroupElement>& xs) {
    return std::vector<GroupVelocity>{rhs(s, xs.front())};
  };
  return step_product({x}, field, t, cfg).front();
}

std::int64_t step_count(double duration, double dt) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw ValidationError("duration must be positive and finite");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive and finite");
  const double ratio = duration / dt;
  const auto n = static_cast<std::int64_t>(std::llround(ratio));
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio)) {
    throw ValidationError("duration must be a whole number of steps of dt");
  }
  return n;
}

TimeSeries integrate(const InvariantSystem& sys, const std::optional<ObserverSpec>& spec,
                     const GroupElement& x0, const std::optional<GroupElement>& xhat0,
                     const InputSignal& inputs, double duration, const IntegratorConfig& cfg,
                     const std::optional<NoiseModel>& noise) {
  sys.validate();
  cfg.validate();
  if (x0.kind() != sys.group) throw GroupMismatch("initial state is not on the system group");
  if (inputs.dim() != sys.input_dim) throw ValidationError("input signal has the wrong dimension");
  const bool observe = spec.has_value();
  if (observe && !xhat0) throw ValidationError("an observer needs an initial estimate");
  if (observe && xhat0->kind() != sys.group) {
    throw GroupMismatch("initial estimate is not on the system group");
  }
  if (noise && noise->stddev.size() != sys.output_dim) {
    throw ValidationError("noise needs one standard deviation per output coordinate");
  }
  const std::int64_t steps = step_count(duration, cfg.dt);

  std::mt19937_64 rng(noise ? noise->seed : 0);
  std::normal_distribution<double> normal;
  Vector current_noise = Vector::Zero(sys.output_dim);
  auto draw_noise = [&] {
    if (!noise) return;
    for (int i = 0; i < sys.output_dim; ++i) current_noise(i) = noise->stddev(i) * normal(rng);
  };

  const ProductField field = [&](double t, const std::vector<GroupElement>& xs) {
    const Vector u = inputs(t);
    std::vector<GroupVelocity> v;
    v.push_back(GroupVelocity::left(dynamics_rhs(sys, xs[0], u)));
    if (observe) {
      const Vector y = output(sys, xs[0], u) + current_noise;
      v.push_back(observer_rhs(sys, *spec, xs[1], u, y));
    }
    return v;
  };

  TimeSeries ts;
  const auto samples = static_cast<size_t>(steps + 1);
  ts.t.reserve(samples);
  ts.x.reserve(samples);
  std::vector<GroupElement> state{x0};
  if (observe) state.push_back(*xhat0);

  for (std::int64_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    draw_noise();
    const Vector u = inputs(t);
    ts.t.push_back(t);
    ts.x.push_back(state[0]);
    ts.u.push_back(u);
    ts.y.push_back(output(sys, state[0], u) + current_noise);
    if (observe) {
      ts.xhat.push_back(state[1]);
      ts.eta.push_back(error(state[0], state[1], spec->error_side));
      ts.yhat.push_back(output(sys, state[1], u));
    }
    if (k == steps) break;
    state = step_product(state, field, t, cfg);
  }
  return ts;
}

std::vector<GroupElement> integrate_error(const InvariantSystem& sys, const ObserverSpec& spec,
                                          const GroupElement& eta0,
                                          const std::function<Vector(double)>& invariant_input,
                                          double duration, const IntegratorConfig& cfg) {
  sys.validate();
  cfg.validate();
  const std::int64_t steps = step_count(duration, cfg.dt);
  const Vector unused = Vector::Zero(sys.input_dim);
  const VectorField field = [&](double t, const GroupElement& eta) {
    return error_rhs(sys, spec, eta,
                     sys.side == ActionSide::kRight ? unused : invariant_input(t));
  };
  std::vector<GroupElement> out;
  out.reserve(static_cast<size_t>(steps + 1));
  out.push_back(eta0);
  for (std::int64_t k = 0; k < steps; ++k) {
    out.push_back(step_group(out.back(), field, static_cast<double>(k) * cfg.dt, cfg));
  }
  return out;
}

}  // namespace invobs
