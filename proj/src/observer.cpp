#include "invobs/observer.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>
#include <unsupported/Eigen/KroneckerProduct>

#include "invobs/errors.hpp"
#include "numdiff.hpp"

namespace invobs {

namespace {

// Right corrections depend on the output only; the hook sees a zero input.
Vector right_invariant_input(const InvariantSystem& sys) { return Vector::Zero(sys.input_dim); }

Matrix correction_gain(const InvariantSystem& sys, const ObserverSpec& spec, const Vector& ibar) {
  if (!spec.hook) return spec.gain;
  return -detail::central_jacobian(
      [&](const Vector& dy) { return spec.correction(ibar, dy); }, Vector::Zero(sys.output_dim));
}

}  // namespace

AlgebraVector ObserverSpec::correction(const Vector& invariant_input,
                                       const Vector& output_error) const {
  if (hook) return hook(invariant_input, output_error);
  return -gain * output_error;
}

ObserverSpec make_observer(const InvariantSystem& sys, Matrix gain) {
  if (gain.rows() != sys.dim() || gain.cols() != sys.output_dim) {
    throw ValidationError("gain matrix must be " + std::to_string(sys.dim()) + "x" +
                          std::to_string(sys.output_dim));
  }
  if (!gain.allFinite()) throw ValidationError("gain matrix is not finite");
  ObserverSpec spec;
  spec.gain = std::move(gain);
  spec.error_side = sys.side;
  return spec;
}

ObserverSpec open_loop_observer(const InvariantSystem& sys) {
  return make_observer(sys, Matrix::Zero(sys.dim(), sys.output_dim));
}

Vector output_error(const InvariantSystem& sys, const GroupElement& xhat, const Vector& u,
                    const Vector& y) {
  const Vector seen = sys.output_action(inverse(xhat), y);
  if (sys.side == ActionSide::kRight) return seen - sys.output_at_identity(u);
  return seen - sys.output_at_identity(invariants_I(sys, xhat, u));
}

GroupVelocity observer_rhs(const InvariantSystem& sys, const ObserverSpec& spec,
                           const GroupElement& xhat, const Vector& u, const Vector& y) {
  if (sys.side == ActionSide::kRight) {
    return {sys.body_velocity(u),
            spec.correction(right_invariant_input(sys), output_error(sys, xhat, u, y))};
  }
  const Vector inv = invariants_I(sys, xhat, u);
  const Vector dy = sys.output_action(inverse(xhat), y) - sys.output_at_identity(inv);
  return GroupVelocity::left(sys.body_velocity(inv) + spec.correction(inv, dy));
}

GroupElement error(const GroupElement& x, const GroupElement& xhat, ActionSide side) {
  if (side == ActionSide::kLeft) return compose(inverse(x), xhat);
  return compose(xhat, inverse(x));
}

GroupVelocity error_rhs(const InvariantSystem& sys, const ObserverSpec& spec,
                        const GroupElement& eta, const Vector& invariant_input) {
  const GroupElement eta_inv = inverse(eta);
  if (sys.side == ActionSide::kRight) {
    const Vector zero = right_invariant_input(sys);
    const Vector dy = output(sys, eta_inv, zero) - sys.output_at_identity(zero);
    return GroupVelocity::right(spec.correction(zero, dy));
  }
  // psi_{(x eta)^-1}(u) = psi_{eta^-1}(I(x,u))
  const Vector inv_hat = sys.input_action(eta_inv, invariant_input);
  const Vector dy = output(sys, eta_inv, inv_hat) - sys.output_at_identity(inv_hat);
  return {sys.body_velocity(inv_hat) + spec.correction(inv_hat, dy),
          -sys.body_velocity(invariant_input)};
}

// ---------------------------------------------------------------------------
// Linearization

Matrix LinearizedPair::closed_loop() const {
  if (!L) return A;
  return A + *L * C;
}

Matrix output_jacobian(const InvariantSystem& sys, const Vector& ubar) {
  if (sys.jacobians.output) return sys.jacobians.output(ubar);
  return detail::central_jacobian(
      [&](const Vector& xi) { return output(sys, exp(sys.group, xi), ubar); },
      Vector::Zero(sys.dim()));
}

LinearizedPair linearize(const InvariantSystem& sys, const Vector& ubar) {
  sys.validate();
  if (ubar.size() != sys.input_dim) {
    throw ValidationError("u-bar must have " + std::to_string(sys.input_dim) + " entries");
  }
  const int n = sys.dim();
  LinearizedPair pair;
  pair.C = output_jacobian(sys, ubar);
  if (sys.side == ActionSide::kRight) {
    pair.A = Matrix::Zero(n, n);
    return pair;
  }
  // A xi = [xi, fbar] - df/du dpsi/dg xi
  const AlgebraVector fbar = sys.body_velocity(ubar);
  const Matrix bracket_part = -structure_constants(sys.group).ad(fbar);
  const Matrix df_du =
      sys.jacobians.body_velocity
          ? sys.jacobians.body_velocity(ubar)
          : detail::central_jacobian([&](const Vector& u) { return sys.body_velocity(u); }, ubar);
  const Matrix dpsi_dg =
      sys.jacobians.input_action
          ? sys.jacobians.input_action(ubar)
          : detail::central_jacobian(
                [&](const Vector& xi) { return sys.input_action(exp(sys.group, xi), ubar); },
                Vector::Zero(n));
  pair.A = bracket_part - df_du * dpsi_dg;
  return pair;
}

LinearizedPair linearize(const InvariantSystem& sys, const ObserverSpec& spec,
                         const Vector& ubar) {
  LinearizedPair pair = linearize(sys, ubar);
  const Vector ibar = sys.side == ActionSide::kRight ? right_invariant_input(sys) : ubar;
  pair.L = correction_gain(sys, spec, ibar);
  return pair;
}

Matrix observability_matrix(const Matrix& A, const Matrix& C) {
  const auto n = A.rows();
  const auto p = C.rows();
  Matrix obs(n * p, n);
  Matrix block = C;
  for (Eigen::Index k = 0; k < n; ++k) {
    obs.middleRows(k * p, p) = block;
    block = block * A;
  }
  return obs;
}

int observability_rank(const Matrix& A, const Matrix& C) {
  const Matrix obs = observability_matrix(A, C);
  Eigen::JacobiSVD<Matrix> svd(obs);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double tol = 1e-9 * std::max(1.0, sv(0));
  return static_cast<int>((sv.array() > tol).count());
}

ObservabilityReport observability_check(const InvariantSystem& sys, const Vector& ubar) {
  const LinearizedPair pair = linearize(sys, ubar);
  return {observability_rank(pair.A, pair.C), sys.dim()};
}

// ---------------------------------------------------------------------------
// Pole placement

std::vector<std::complex<double>> sorted_eigenvalues(const Matrix& m) {
  Eigen::EigenSolver<Matrix> es(m, false);
  std::vector<std::complex<double>> ev(es.eigenvalues().data(),
                                       es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return ev;
}

namespace {

// Largest distance between the spectrum of m and the requested poles after
// greedy nearest matching.
// Monic characteristic polynomial coefficients from a root list.
std::vector<std::complex<double>> poly_from_roots(const std::vector<std::complex<double>>& roots) {
  std::vector<std::complex<double>> c{1.0};
  for (const auto& r : roots) {
    c.push_back(0.0);
    for (size_t i = c.size() - 1; i > 0; --i) c[i] -= r * c[i - 1];
  }
  return c;
}

// Distance between the spectrum of m and the requested poles, measured on
// characteristic polynomial coefficients. Repeated poles make individual
// eigenvalues ill-conditioned (a 3-fold pole moves by eps^(1/3)), while the
// coefficients stay accurate to working precision.
double spectrum_mismatch(const Matrix& m, const std::vector<std::complex<double>>& poles) {
  const auto have = poly_from_roots(sorted_eigenvalues(m));
  const auto want = poly_from_roots(poles);
  double worst = 0.0;
  for (size_t i = 0; i < want.size(); ++i) {
    worst = std::max(worst, std::abs(have[i] - want[i]) / (1.0 + std::abs(want[i])));
  }
  return worst;
}

// Real matrix with the requested spectrum. Conjugate pairs become 2x2
// rotation blocks; with `chain` repeated real poles share one Jordan block.
Matrix target_spectrum_matrix(const std::vector<std::complex<double>>& poles, bool chain) {
  const auto n = static_cast<Eigen::Index>(poles.size());
  Matrix lam = Matrix::Zero(n, n);
  std::vector<double> reals;
  std::vector<std::complex<double>> upper;
  for (const auto& p : poles) {
    if (std::abs(p.imag()) <= 1e-12 * std::max(1.0, std::abs(p))) {
      reals.push_back(p.real());
    } else if (p.imag() > 0) {
      upper.push_back(p);
    }
  }
  std::sort(reals.begin(), reals.end());
  Eigen::Index k = 0;
  for (size_t i = 0; i < reals.size(); ++i, ++k) {
    lam(k, k) = reals[i];
    if (chain && i > 0 && reals[i] == reals[i - 1]) lam(k - 1, k) = 1.0;
  }
  for (const auto& p : upper) {
    lam(k, k) = p.real();
    lam(k + 1, k + 1) = p.real();
    lam(k, k + 1) = p.imag();
    lam(k + 1, k) = -p.imag();
    k += 2;
  }
  return lam;
}

void validate_poles(const std::vector<std::complex<double>>& poles, Eigen::Index n) {
  if (static_cast<Eigen::Index>(poles.size()) != n) {
    throw ValidationError("expected " + std::to_string(n) + " poles, got " +
                          std::to_string(poles.size()));
  }
  std::vector<std::complex<double>> pending;
  for (const auto& p : poles) {
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) {
      throw ValidationError("poles must be finite");
    }
    if (std::abs(p.imag()) <= 1e-12 * std::max(1.0, std::abs(p))) continue;
    auto it = std::find_if(pending.begin(), pending.end(), [&](const auto& q) {
      return std::abs(q - std::conj(p)) <= 1e-12 * std::max(1.0, std::abs(p));
    });
    if (it != pending.end()) {
      pending.erase(it);
    } else {
      pending.push_back(p);
    }
  }
  if (!pending.empty()) throw ValidationError("poles are not closed under conjugation");
}

}  // namespace

Matrix design_gain_pole(const Matrix& A, const Matrix& C,
                        const std::vector<std::complex<double>>& poles) {
  const auto n = A.rows();
  if (A.cols() != n || C.cols() != n) throw ValidationError("A and C dimensions disagree");
  validate_poles(poles, n);
  const int rank = observability_rank(A, C);
  if (rank < n) {
    throw NotObservable("pair (A, C) is not observable: rank " + std::to_string(rank) + " < " +
                            std::to_string(n),
                        rank, static_cast<int>(n));
  }

  // Dual problem: F + B K with F = A^T, B = C^T has the requested spectrum,
  // then Lbar = K^T. Solve F T - T Lam = -B G for a chosen G and take
  // K = G T^-1, so (F + B K) T = T Lam.
  const Matrix F = A.transpose();
  const Matrix B = C.transpose();
  const auto p = B.cols();
  const Matrix eye = Matrix::Identity(n, n);

  std::mt19937_64 rng(20240917);
  std::normal_distribution<double> normal;
  auto random_matrix = [&](Eigen::Index r, Eigen::Index c) {
    Matrix m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = normal(rng);
    return m;
  };

  Matrix best;
  double best_score = INFINITY;
  for (int chain = 0; chain < 2; ++chain) {
    const Matrix lam = target_spectrum_matrix(poles, chain == 1);
    for (int trial = 0; trial < 24; ++trial) {
      // A preliminary feedback moves the open-loop spectrum away from the
      // targets when the Sylvester equation is singular.
      const Matrix k0 = trial < 12 ? Matrix::Zero(p, n) : random_matrix(p, n);
      const Matrix f0 = F + B * k0;
      const Matrix g = random_matrix(p, n);
      const Matrix kron =
          Matrix(Eigen::kroneckerProduct(eye, f0)) - Matrix(Eigen::kroneckerProduct(lam.transpose(), eye));
      Eigen::FullPivLU<Matrix> lu(kron);
      if (!lu.isInvertible()) continue;
      const Matrix rhs = -(B * g);
      const Vector vec_t = lu.solve(Eigen::Map<const Vector>(rhs.data(), rhs.size()));
      const Matrix t = Eigen::Map<const Matrix>(vec_t.data(), n, n);
      Eigen::JacobiSVD<Matrix> svd(t);
      const auto& sv = svd.singularValues();
      if (sv(n - 1) <= 1e-12 * sv(0)) continue;
      const Matrix k = k0 + g * t.inverse();
      const Matrix lbar = k.transpose();
      const double mismatch = spectrum_mismatch(A + lbar * C, poles);
      const double score = mismatch + 1e-14 * sv(0) / sv(n - 1);
      if (score < best_score) {
        best_score = score;
        best = lbar;
      }
      if (mismatch < 1e-10) return lbar;
    }
    if (best_score < 1e-6) return best;
  }
  if (best.size() == 0 || spectrum_mismatch(A + best * C, poles) > 1e-6) {
    throw Error("pole placement failed to reach the requested spectrum");
  }
  return best;
}

ObserverSpec design_gain_adjoint(const InvariantSystem& sys, const Vector& weights,
                                 const std::optional<Vector>& ubar) {
  sys.validate();
  Vector k;
  if (weights.size() == 1) {
    k = Vector::Constant(sys.output_dim, weights(0));
  } else if (weights.size() == sys.output_dim) {
    k = weights;
  } else {
    throw ValidationError("adjoint gain needs 1 or " + std::to_string(sys.output_dim) +
                          " weights");
  }
  if ((k.array() < 0.0).any() || !k.allFinite()) {
    throw ValidationError("adjoint gain weights must be finite and non-negative");
  }
  const Matrix dh = output_jacobian(sys, ubar.value_or(Vector::Zero(sys.input_dim)));
  return make_observer(sys, -(dh.transpose() * k.asDiagonal()));
}

// ---------------------------------------------------------------------------
// Stability

std::string_view definiteness_name(Definiteness d) {
  switch (d) {
    case Definiteness::kNegativeDefinite:
      return "negative-definite";
    case Definiteness::kNegativeSemidefinite:
      return "negative-semidefinite";
    case Definiteness::kIndefinite:
      return "indefinite";
  }
  return "?";
}

StabilityReport stability_check(const LinearizedPair& pair) {
  const Matrix m = pair.closed_loop();
  StabilityReport rep;
  rep.eigenvalues = sorted_eigenvalues(m);
  rep.max_real_part = -INFINITY;
  for (const auto& ev : rep.eigenvalues) rep.max_real_part = std::max(rep.max_real_part, ev.real());
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  rep.symmetric_eigenvalues = es.eigenvalues();
  const double scale = std::max(1.0, sym.cwiseAbs().maxCoeff());
  const double top = rep.symmetric_eigenvalues.maxCoeff();
  if (top < -1e-12 * scale) {
    rep.symmetric_part = Definiteness::kNegativeDefinite;
  } else if (top <= 1e-12 * scale) {
    rep.symmetric_part = Definiteness::kNegativeSemidefinite;
  } else {
    rep.symmetric_part = Definiteness::kIndefinite;
  }
  return rep;
}

}  // namespace invobs
