#include "invobs/examples.hpp"

#include <cmath>
#include <numbers>

#include "invobs/errors.hpp"

namespace invobs {

Eigen::Vector3d AttitudeConfig::field_from_dip(double dip_deg) {
  const double d = dip_deg * std::numbers::pi / 180.0;
  return {std::cos(d), 0.0, std::sin(d)};
}

InvariantSystem build_attitude_system(const AttitudeConfig& cfg) {
  if (!cfg.gravity.allFinite() || !cfg.magnetic.allFinite()) {
    throw ValidationError("reference vectors must be finite");
  }
  InvariantSystem sys;
  sys.name = cfg.magnetometer_only ? "attitude-mag" : "attitude";
  sys.group = GroupKind::kSO3;
  sys.side = ActionSide::kRight;
  sys.input_dim = 3;
  sys.output_dim = cfg.magnetometer_only ? 3 : 6;
  sys.body_velocity = [](const Vector& u) -> AlgebraVector { return u; };
  // interior-automorphism differential: omega -> R^T omega
  sys.input_action = [](const GroupElement& g, const Vector& u) -> Vector {
    return g.so3().inverse().rotate(Eigen::Vector3d(u));
  };
  sys.output_action = [](const GroupElement& g, const Vector& y) -> Vector {
    const SO3 inv = g.so3().inverse();
    Vector out(y.size());
    for (Eigen::Index k = 0; k + 3 <= y.size(); k += 3) {
      out.segment<3>(k) = inv.rotate(Eigen::Vector3d(y.segment<3>(k)));
    }
    return out;
  };
  Vector he(sys.output_dim);
  if (cfg.magnetometer_only) {
    he << cfg.magnetic;
  } else {
    he << cfg.gravity, cfg.magnetic;
  }
  sys.output_at_identity = [he](const Vector&) -> Vector { return he; };
  // R^-1 v ~ v + v x xi near the identity, so each block of Dh(e) is [v]x
  const bool mag_only = cfg.magnetometer_only;
  const Eigen::Vector3d g = cfg.gravity, b = cfg.magnetic;
  sys.jacobians.output = [mag_only, g, b](const Vector&) -> Matrix {
    if (mag_only) return skew(b);
    Matrix c(6, 3);
    c << skew(g), skew(b);
    return c;
  };
  return sys;
}

ObserverSpec default_attitude_observer(const AttitudeConfig& cfg) {
  const InvariantSystem sys = build_attitude_system(cfg);
  Vector weights(sys.output_dim);
  if (cfg.magnetometer_only) {
    weights.setConstant(cfg.gain_magnetic);
  } else {
    weights << Eigen::Vector3d::Constant(cfg.gain_gravity),
        Eigen::Vector3d::Constant(cfg.gain_magnetic);
  }
  return design_gain_adjoint(sys, weights);
}

AttitudeObservability attitude_observability(const AttitudeConfig& cfg) {
  const InvariantSystem sys = build_attitude_system(cfg);
  AttitudeObservability out;
  out.report = observability_check(sys, Vector::Zero(3));
  if (!cfg.magnetometer_only) {
    const double ng = cfg.gravity.norm(), nb = cfg.magnetic.norm();
    const double angle =
        ng > 0.0 && nb > 0.0 ? std::atan2(cfg.gravity.cross(cfg.magnetic).norm(),
                                          cfg.gravity.dot(cfg.magnetic))
                             : 0.0;
    out.collinear_reference_vectors = angle < 1e-3 || std::numbers::pi - angle < 1e-3;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

InvariantSystem car_skeleton() {
  InvariantSystem sys;
  sys.name = "car";
  sys.group = GroupKind::kSE2;
  sys.side = ActionSide::kLeft;
  sys.input_dim = 2;
  sys.output_dim = 2;
  sys.body_velocity = [](const Vector& u) -> AlgebraVector {
    return Eigen::Vector3d(u(1), u(0), 0.0);
  };
  sys.input_action = [](const GroupElement&, const Vector& u) -> Vector { return u; };
  sys.output_action = [](const GroupElement& g, const Vector& y) -> Vector {
    return se2_apply(g.se2(), Eigen::Vector2d(y));
  };
  sys.output_at_identity = [](const Vector&) -> Vector { return Eigen::Vector2d::Zero(); };
  return sys;
}

}  // namespace

InvariantSystem build_car_system(const CarConfig&) { return car_skeleton(); }

InputSignal car_inputs(const CarConfig& cfg) {
  if (!cfg.speed || !cfg.steering_rate) throw ValidationError("car profiles must be set");
  auto speed = cfg.speed;
  auto steer = cfg.steering_rate;
  return InputSignal::function(2, [speed, steer](double t) -> Vector {
    const Eigen::Vector2d u(speed(t), steer(t));
    if (!u.allFinite()) throw ValidationError("car input profile is not finite");
    return u;
  });
}

InvariantSystem build_planar_system() {
  InvariantSystem sys;
  sys.name = "planar";
  sys.group = GroupKind::kR2;
  sys.side = ActionSide::kLeft;
  sys.input_dim = 2;
  sys.output_dim = 2;
  sys.body_velocity = [](const Vector& u) -> AlgebraVector { return u; };
  sys.input_action = [](const GroupElement&, const Vector& u) -> Vector { return u; };
  sys.output_action = [](const GroupElement& g, const Vector& y) -> Vector {
    return y + g.r2().translation();
  };
  sys.output_at_identity = [](const Vector&) -> Vector { return Eigen::Vector2d::Zero(); };
  return sys;
}

InvariantSystem build_broken_car_system() {
  InvariantSystem sys = car_skeleton();
  sys.name = "broken-car";
  sys.output_override = [](const GroupElement& x, const Vector&) -> Vector {
    const SE2& g = x.se2();
    return g.translation() + Eigen::Vector2d(0.1 * g.theta(), 0.0);
  };
  return sys;
}

const std::vector<std::string>& system_names() {
  static const std::vector<std::string> names = {"attitude", "attitude-mag", "car", "planar",
                                                 "broken-car"};
  return names;
}

InvariantSystem make_named_system(const std::string& name, const AttitudeConfig& attitude) {
  if (name == "attitude" || name == "attitude-mag") {
    AttitudeConfig cfg = attitude;
    cfg.magnetometer_only = name == "attitude-mag";
    return build_attitude_system(cfg);
  }
  if (name == "car") return build_car_system();
  if (name == "planar") return build_planar_system();
  if (name == "broken-car") return build_broken_car_system();
  throw ValidationError("unknown system '" + name + "'");
}

Vector default_ubar(const std::string& name) {
  if (name == "car" || name == "broken-car") return Eigen::Vector2d(1.0, 0.0);
  if (name == "planar") return Eigen::Vector2d(1.0, 0.0);
  if (name == "attitude" || name == "attitude-mag") return Eigen::Vector3d(0.0, 0.0, 0.5);
  throw ValidationError("unknown system '" + name + "'");
}

}  // namespace invobs
