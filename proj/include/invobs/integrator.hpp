#pragma once

// Structure-preserving integration of flows on the groups.
//
// Velocities are GroupVelocity values (body piece applied on the right of x,
// spatial piece on the left). Lie-Euler uses
//   x <- exp(dt spatial) x exp(dt body)
// and RKMK4 is the classical Runge-Kutta-Munthe-Kaas scheme in the body
// frame with the dexp^-1 series truncated after the second commutator.
// Several elements can be stepped jointly (true state and estimate), so
// that every stage sees consistent states.

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "invobs/observer.hpp"

namespace invobs {

enum class Method { kLieEuler, kRkmk4 };

std::string_view method_name(Method m);
/// "lie-euler" | "rkmk4"; throws ValidationError otherwise.
Method parse_method(std::string_view name);

struct IntegratorConfig {
  Method method = Method::kRkmk4;
  double dt = 1e-3;
  bool renormalize = true;

  void validate() const;
};

using VectorField = std::function<GroupVelocity(double t, const GroupElement& x)>;
using ProductField =
    std::function<std::vector<GroupVelocity>(double t, const std::vector<GroupElement>& xs)>;

/// One step of length cfg.dt from time t. Throws StepRejected on non-finite
/// velocities.
GroupElement step_group(const GroupElement& x, const VectorField& rhs, double t,
                        const IntegratorConfig& cfg);
std::vector<GroupElement> step_product(const std::vector<GroupElement>& xs,
                                       const ProductField& rhs, double t,
                                       const IntegratorConfig& cfg);

/// Additive Gaussian measurement noise, redrawn once per step.
struct NoiseModel {
  Vector stddev;  // one entry per output coordinate
  std::uint64_t seed = 0;
};

struct TimeSeries {
  std::vector<double> t;
  std::vector<GroupElement> x;
  std::vector<Vector> u;
  std::vector<Vector> y;
  // empty without an observer
  std::vector<GroupElement> xhat;
  std::vector<GroupElement> eta;
  std::vector<Vector> yhat;
};

/// Number of steps covering `duration`; throws ValidationError unless the
/// duration is a whole number of steps.
std::int64_t step_count(double duration, double dt);

/// Integrates the true system and, when an observer is given, the estimate
/// fed with the (possibly noisy) measured output. Samples every step.
TimeSeries integrate(const InvariantSystem& sys, const std::optional<ObserverSpec>& spec,
                     const GroupElement& x0, const std::optional<GroupElement>& xhat0,
                     const InputSignal& inputs, double duration, const IntegratorConfig& cfg,
                     const std::optional<NoiseModel>& noise = std::nullopt);

/// Integrates the closed-form error flow directly. `invariant_input` gives
/// I(x(t), u(t)) along the true trajectory; right systems ignore it.
std::vector<GroupElement> integrate_error(const InvariantSystem& sys, const ObserverSpec& spec,
                                          const GroupElement& eta0,
                                          const std::function<Vector(double)>& invariant_input,
                                          double duration, const IntegratorConfig& cfg);

}  // namespace invobs
