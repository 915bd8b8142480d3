#pragma once

// Group-agnostic Lie group / Lie algebra primitives.
//
// A GroupElement is a tagged value on one of the concrete groups of
// groups.hpp. Algebra elements are plain coordinate vectors in the group's
// fixed basis {W_1..W_n}; the scalar product on the algebra is the Euclidean
// one in that basis.

#include <random>
#include <string_view>
#include <variant>
#include <vector>

#include "invobs/groups.hpp"

namespace invobs {

enum class GroupKind { kSO3, kSE2, kR2 };

std::string_view group_name(GroupKind kind);
int group_dim(GroupKind kind);

/// Coordinates xi^1..xi^n of a Lie-algebra element in the fixed basis.
using AlgebraVector = Vector;

class GroupElement {
 public:
  GroupElement(const SO3& g) : v_(g) {}  // NOLINT(google-explicit-constructor)
  GroupElement(const SE2& g) : v_(g) {}  // NOLINT(google-explicit-constructor)
  GroupElement(const R2& g) : v_(g) {}   // NOLINT(google-explicit-constructor)

  static GroupElement identity(GroupKind kind);

  GroupKind kind() const { return static_cast<GroupKind>(v_.index()); }
  int dim() const { return group_dim(kind()); }

  const SO3& so3() const;
  const SE2& se2() const;
  const R2& r2() const;

  /// 3x3 matrix representation (rotation matrix, or homogeneous form).
  Eigen::Matrix3d matrix() const;

  /// Raw storage: quaternion (w, x, y, z); (theta, tx, ty); (tx, ty).
  Vector params() const;
  /// Storage canonicalized for comparison (quaternion with w >= 0).
  Vector canonical_params() const;
  static GroupElement from_params(GroupKind kind, const Vector& params);

  template <class Visitor>
  decltype(auto) visit(Visitor&& vis) const {
    return std::visit(std::forward<Visitor>(vis), v_);
  }

 private:
  std::variant<SO3, SE2, R2> v_;
};

GroupElement compose(const GroupElement& g1, const GroupElement& g2);
GroupElement inverse(const GroupElement& g);
GroupElement exp(GroupKind kind, const AlgebraVector& xi);
/// Principal-branch exponential coordinates. Throws AtCutLocus.
AlgebraVector log(const GroupElement& g);

/// Matrix of xi -> coordinates of d/de g^-1 exp(e xi) g at e = 0, i.e. the
/// input action psi_g = DL_{g^-1} DR_g. Satisfies
/// adjoint(g1 g2) = adjoint(g2) adjoint(g1).
Matrix adjoint(const GroupElement& g);

/// Velocity dx/dt = DL_x body + DR_x spatial, both pieces as algebra
/// coordinates. Observers of right-equivariant systems apply their correction
/// on the spatial side.
struct GroupVelocity {
  AlgebraVector body;
  AlgebraVector spatial;

  static GroupVelocity left(AlgebraVector v) {
    const auto n = v.size();
    return {std::move(v), AlgebraVector::Zero(n)};
  }
  static GroupVelocity right(AlgebraVector v) {
    const auto n = v.size();
    return {AlgebraVector::Zero(n), std::move(v)};
  }
  /// Equivalent purely body-frame velocity at x: body + adjoint(x) spatial.
  AlgebraVector body_at(const GroupElement& x) const;
};

/// Largest per-coordinate difference of the canonical storage of a and b.
double distance(const GroupElement& a, const GroupElement& b);

/// Fixed set of n generator matrices spanning the Lie algebra.
class Basis {
 public:
  explicit Basis(std::vector<Eigen::Matrix3d> generators);

  static const Basis& standard(GroupKind kind);

  int size() const { return static_cast<int>(generators_.size()); }
  const std::vector<Eigen::Matrix3d>& generators() const { return generators_; }
  bool independent() const { return rank_ == size(); }

  /// sum_i xi^i W_i
  Eigen::Matrix3d hat(const AlgebraVector& xi) const;
  /// Least-squares coordinates of an algebra matrix. Throws SingularBasis.
  AlgebraVector coordinates(const Eigen::Matrix3d& m) const;

 private:
  std::vector<Eigen::Matrix3d> generators_;
  Matrix pinv_;  // n x 9
  int rank_;
};

/// C[i][j][k] with [W_i, W_j] = sum_k C[i][j][k] W_k.
class StructureConstants {
 public:
  explicit StructureConstants(int n) : n_(n), c_(static_cast<size_t>(n * n * n), 0.0) {}

  int dim() const { return n_; }
  double& operator()(int i, int j, int k) { return c_[static_cast<size_t>((i * n_ + j) * n_ + k)]; }
  double operator()(int i, int j, int k) const {
    return c_[static_cast<size_t>((i * n_ + j) * n_ + k)];
  }

  /// Matrix of eta -> [xi, eta].
  Matrix ad(const AlgebraVector& xi) const;
  AlgebraVector bracket(const AlgebraVector& a, const AlgebraVector& b) const;

 private:
  int n_;
  std::vector<double> c_;
};

/// Throws SingularBasis when the generators are not linearly independent.
StructureConstants structure_constants(const Basis& basis);
const StructureConstants& structure_constants(GroupKind kind);

/// Matrix commutator of the generator representations, in basis coordinates.
AlgebraVector bracket(GroupKind kind, const AlgebraVector& a, const AlgebraVector& b);

/// Gaussian direction scaled to a uniform norm in [0, max_norm].
AlgebraVector random_algebra(GroupKind kind, std::mt19937_64& rng, double max_norm);
/// Haar-uniform rotation; SE(2)/R^2 translations with unit-variance coordinates.
GroupElement random_element(GroupKind kind, std::mt19937_64& rng);

}  // namespace invobs
