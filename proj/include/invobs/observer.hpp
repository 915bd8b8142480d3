#pragma once

// Invariant pre-observers, invariant error dynamics, first-order
// approximation and gain design.
//
// Left systems use the left error eta = x^-1 xhat and the observer
//
//   dxhat/dt = DL_xhat [ f_e(I(xhat,u)) + L(I(xhat,u), rho_{xhat^-1}(y) - h_e(I(xhat,u))) ]
//
// Right systems use eta = xhat x^-1 and
//
//   dxhat/dt = DL_xhat u + DR_xhat L(rho_{xhat^-1}(y) - h_e).
//
// L is the correction: by default -Lbar * (output error), so that the
// linearized error system reads dxi/dt = (A + Lbar C) xi.

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "invobs/system.hpp"

namespace invobs {

/// (invariant input, output error) -> correction in the algebra.
using CorrectionHook = std::function<AlgebraVector(const Vector& invariant_input,
                                                   const Vector& output_error)>;

struct ObserverSpec {
  Matrix gain;  // Lbar, n x p
  CorrectionHook hook;
  ActionSide error_side = ActionSide::kLeft;

  AlgebraVector correction(const Vector& invariant_input, const Vector& output_error) const;
};

/// Linear-correction observer with gain matrix Lbar (n x p).
ObserverSpec make_observer(const InvariantSystem& sys, Matrix gain);
/// Zero gain: the observer copies the open-loop dynamics.
ObserverSpec open_loop_observer(const InvariantSystem& sys);

/// rho_{xhat^-1}(y) - h_e(I(xhat,u)) for left systems, rho_{xhat^-1}(y) - h_e for right.
Vector output_error(const InvariantSystem& sys, const GroupElement& xhat, const Vector& u,
                    const Vector& y);

GroupVelocity observer_rhs(const InvariantSystem& sys, const ObserverSpec& spec,
                           const GroupElement& xhat, const Vector& u, const Vector& y);

/// x^-1 xhat (left) or xhat x^-1 (right).
GroupElement error(const GroupElement& x, const GroupElement& xhat, ActionSide side);

/// Closed-form error flow. Left systems depend on the trajectory only through
/// the true invariant input; the right path never reads `invariant_input`.
GroupVelocity error_rhs(const InvariantSystem& sys, const ObserverSpec& spec,
                        const GroupElement& eta, const Vector& invariant_input);

struct LinearizedPair {
  Matrix A;                // n x n
  Matrix C;                // p x n
  std::optional<Matrix> L; // n x p

  Matrix closed_loop() const;
};

/// A from the structure constants and Jacobians at u-bar, C = dh/dx(e, u-bar)
/// in exponential coordinates. With a spec, L is -d(correction)/d(output error).
LinearizedPair linearize(const InvariantSystem& sys, const Vector& ubar);
LinearizedPair linearize(const InvariantSystem& sys, const ObserverSpec& spec, const Vector& ubar);

/// Dh(e) = dh/dx(e, u-bar), p x n.
Matrix output_jacobian(const InvariantSystem& sys, const Vector& ubar);

Matrix observability_matrix(const Matrix& A, const Matrix& C);
int observability_rank(const Matrix& A, const Matrix& C);

struct ObservabilityReport {
  int rank = 0;
  int dim = 0;
  bool observable() const { return rank == dim; }
};

ObservabilityReport observability_check(const InvariantSystem& sys, const Vector& ubar);

/// Lbar with the spectrum of A + Lbar C equal to `poles`, which must be closed under
/// conjugation. Works on the dual pair (A^T, C^T). Throws NotObservable.
Matrix design_gain_pole(const Matrix& A, const Matrix& C,
                        const std::vector<std::complex<double>>& poles);

/// L(y) = Dh(e)^T K (output error), K = diag(weights) in the output space
/// (a single weight is broadcast). The linearized flow is -Dh^T K Dh.
ObserverSpec design_gain_adjoint(const InvariantSystem& sys, const Vector& weights,
                                 const std::optional<Vector>& ubar = std::nullopt);

enum class Definiteness { kNegativeDefinite, kNegativeSemidefinite, kIndefinite };

std::string_view definiteness_name(Definiteness d);

struct StabilityReport {
  std::vector<std::complex<double>> eigenvalues;
  double max_real_part = 0.0;
  Vector symmetric_eigenvalues;
  Definiteness symmetric_part = Definiteness::kIndefinite;
};

StabilityReport stability_check(const LinearizedPair& pair);

/// Eigenvalues sorted by (real, imag).
std::vector<std::complex<double>> sorted_eigenvalues(const Matrix& m);

}  // namespace invobs
