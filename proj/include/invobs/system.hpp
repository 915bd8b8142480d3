#pragma once

// Intrinsic description of invariant systems on a Lie group.
//
// A system is given by its value at the identity rather than by chart
// expressions:
//
//   left side  (x -> g x):   dx/dt = DL_x f_e(I(x,u)),  y = rho_x(h_e(I(x,u)))
//   right side (x -> x g):   dx/dt = DL_x f_e(u),       y = rho_x(h_e)
//
// with the invariant input I(x,u) = psi_{x^-1}(u). Right systems are the
// left-invariant dynamics with right-equivariant output: u is the body
// velocity and psi_g is the interior-automorphism differential, so f_e must
// intertwine psi with adjoint().

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "invobs/lie.hpp"

namespace invobs {

enum class ActionSide { kLeft, kRight };

std::string_view side_name(ActionSide side);

/// Optional analytic Jacobians at a fixed invariant input u-bar. When unset
/// the observer module falls back to central differences.
struct JacobianOverrides {
  /// d f_e / d u, n x m
  std::function<Matrix(const Vector& ubar)> body_velocity;
  /// d/dxi psi_{exp(xi)}(ubar) at xi = 0, m x n
  std::function<Matrix(const Vector& ubar)> input_action;
  /// d/dxi h(exp(xi), ubar) at xi = 0, p x n
  std::function<Matrix(const Vector& ubar)> output;
};

struct InvariantSystem {
  std::string name;
  GroupKind group = GroupKind::kSO3;
  ActionSide side = ActionSide::kLeft;
  int input_dim = 0;
  int output_dim = 0;

  std::function<AlgebraVector(const Vector& u)> body_velocity;                 // f_e
  std::function<Vector(const GroupElement& g, const Vector& u)> input_action;  // psi_g
  std::function<Vector(const GroupElement& g, const Vector& y)> output_action; // rho_g
  std::function<Vector(const Vector& u)> output_at_identity;                   // h_e

  /// Replaces the reconstructed output map h(x,u). Only used to model systems
  /// that are not actually equivariant (negative controls).
  std::function<Vector(const GroupElement& x, const Vector& u)> output_override;

  JacobianOverrides jacobians;

  int dim() const { return group_dim(group); }
  /// Throws ValidationError when a required map is missing.
  void validate() const;
};

/// I(x,u) = psi_{x^-1}(u).
Vector invariants_I(const InvariantSystem& sys, const GroupElement& x, const Vector& u);

/// Body-frame velocity DL_{x^-1} dx/dt.
AlgebraVector dynamics_rhs(const InvariantSystem& sys, const GroupElement& x, const Vector& u);

Vector output(const InvariantSystem& sys, const GroupElement& x, const Vector& u);

enum class Interpolation { kZeroOrderHold, kLinear };

/// Input u(t), either sampled (strictly increasing timestamps, held or
/// linearly interpolated, clamped outside the sample range) or analytic.
class InputSignal {
 public:
  static InputSignal constant(Vector u);
  static InputSignal sampled(std::vector<double> times, std::vector<Vector> values,
                             Interpolation interp = Interpolation::kZeroOrderHold);
  static InputSignal function(int dim, std::function<Vector(double)> fn);

  Vector operator()(double t) const;
  int dim() const { return dim_; }

 private:
  InputSignal() = default;

  int dim_ = 0;
  std::vector<double> times_;
  std::vector<Vector> values_;
  Interpolation interp_ = Interpolation::kZeroOrderHold;
  std::function<Vector(double)> fn_;
};

struct IdentityCheck {
  std::string name;
  double max_deviation = 0.0;
  bool passed = false;
};

struct EquivarianceReport {
  std::vector<IdentityCheck> checks;
  double tolerance = 1e-8;

  bool passed() const;
  /// Name of the first failing identity, or empty.
  std::string first_failure() const;
};

/// Draws random (g, x, u, y) and measures the action laws, the invariance of
/// the dynamics, the equivariance of the output and the invariance of I.
EquivarianceReport check_equivariance(const InvariantSystem& sys, int samples,
                                      std::uint64_t seed = 1, double tol = 1e-8);

/// Gaussian vector with unit-variance coordinates.
Vector random_vector(int dim, std::mt19937_64& rng);

}  // namespace invobs
