#pragma once

// Declarative experiment description and the simulation runner.
// The file grammar is documented in docs/scenario_format.md.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "invobs/csv.hpp"
#include "invobs/examples.hpp"
#include "invobs/integrator.hpp"

namespace invobs {

struct InputProfile {
  enum class Kind { kConstant, kSine, kSamples };

  Kind kind = Kind::kConstant;
  Vector value;  // constant
  // sine: u_i(t) = offset_i + amplitude_i sin(2 pi frequency_i t + phase_i)
  Vector offset, amplitude, frequency, phase;
  std::vector<double> times;
  std::vector<Vector> values;
  Interpolation interpolation = Interpolation::kZeroOrderHold;

  int dim() const;
  InputSignal signal() const;
};

struct GainSource {
  enum class Kind { kNone, kAdjoint, kMatrix, kPoles };

  Kind kind = Kind::kNone;
  Vector weights;  // adjoint
  Matrix matrix;   // explicit Lbar
  std::vector<std::complex<double>> poles;
  std::optional<Vector> ubar;
};

/// eta(0) = exp(norm * direction); a missing direction is drawn from the seed.
struct InitialError {
  double norm = 0.0;
  std::optional<Vector> direction;
};

struct Scenario {
  std::string name;
  std::string system = "attitude";
  AttitudeConfig attitude;
  Vector x0;
  std::optional<Vector> xhat0;
  std::optional<InitialError> initial_error;
  InputProfile input;
  GainSource observer;
  double duration = 0.0;
  IntegratorConfig integrator;
  int stride = 1;
  std::uint64_t seed = 0;
  std::optional<Vector> noise_std;

  /// Throws ValidationError on any invariant breach.
  void validate() const;
  InvariantSystem build_system() const;
  ObserverSpec build_observer(const InvariantSystem& sys) const;
  GroupElement initial_state() const;
  GroupElement initial_estimate(const InvariantSystem& sys) const;
};

/// Throws ParseError (with line) or ValidationError.
Scenario parse_scenario(const std::string& text, const std::string& source = "<string>");
Scenario load_scenario(const std::string& path);

struct RunSummary {
  std::string name;
  std::string system;
  std::size_t samples = 0;
  double final_xi_norm = 0.0;
  double max_xi_norm = 0.0;
  /// -slope of log |xi| over the second half of the run (NaN when |xi| ~ 0).
  double decay_rate = 0.0;
  bool permanent = false;
  double permanence_deviation = 0.0;

  /// "key: value" lines.
  std::string to_text() const;
};

struct RunResult {
  SimRecord record;
  RunSummary summary;
};

RunResult run_scenario(const Scenario& scenario);
RunResult run_scenario_file(const std::string& path);

/// Column names for a system: t, x_*, xhat_*, xi_1..xi_n, xi_norm, y_*, yhat_*.
std::vector<std::string> record_header(const InvariantSystem& sys);

/// Least-squares slope of log(values) against times, over entries with
/// values above `floor`. NaN with fewer than two usable points.
double log_slope(const std::vector<double>& times, const std::vector<double>& values,
                 double floor = 1e-12);

}  // namespace invobs
