#pragma once

// Wired example systems.
//
// attitude     SO(3), right side. Input: body angular rate (rad/s). Output:
//              (R^-1 G, R^-1 B), accelerometer under the quasi-stationary
//              assumption and magnetometer, both in the body frame.
// attitude-mag Same with the magnetometer only (unobservable).
// car          SE(2), left side. Input: (speed m/s, steering rate rad/s),
//              body velocity (u2, u1, 0). Output: planar position.
// planar       R^2 abelian reference system: velocity input, position output.
// broken-car   car with an x-dependent output bias; not equivariant.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "invobs/observer.hpp"

namespace invobs {

struct AttitudeConfig {
  Eigen::Vector3d gravity{0.0, 0.0, 9.81};
  Eigen::Vector3d magnetic = field_from_dip(60.0);
  double gain_gravity = 1.0;
  double gain_magnetic = 1.0;
  bool magnetometer_only = false;

  /// Unit field (cos d, 0, sin d) for a dip angle d in degrees.
  static Eigen::Vector3d field_from_dip(double dip_deg);
};

InvariantSystem build_attitude_system(const AttitudeConfig& cfg = {});
/// Adjoint-transpose gains with weights (K_G, K_B) per sensor block.
ObserverSpec default_attitude_observer(const AttitudeConfig& cfg = {});

struct AttitudeObservability {
  ObservabilityReport report;
  /// G and B closer than 1e-3 rad to collinear.
  bool collinear_reference_vectors = false;
  bool observable() const { return report.observable() && !collinear_reference_vectors; }
};

AttitudeObservability attitude_observability(const AttitudeConfig& cfg = {});

struct CarConfig {
  std::function<double(double)> speed = [](double) { return 1.0; };
  std::function<double(double)> steering_rate = [](double) { return 0.0; };
};

InvariantSystem build_car_system(const CarConfig& cfg = {});
InputSignal car_inputs(const CarConfig& cfg);

InvariantSystem build_planar_system();
InvariantSystem build_broken_car_system();

/// Names accepted by make_named_system.
const std::vector<std::string>& system_names();
/// Throws ValidationError for unknown names.
InvariantSystem make_named_system(const std::string& name, const AttitudeConfig& attitude = {});
/// Default invariant input used by the CLI for each named system.
Vector default_ubar(const std::string& name);

}  // namespace invobs
