#include "invobs/lie.hpp"

#include <Eigen/SVD>
#include <array>
#include <numbers>
#include <string>

#include "invobs/errors.hpp"

namespace invobs {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_dim(GroupKind kind, const AlgebraVector& xi) {
  if (xi.size() != group_dim(kind)) {
    throw GroupMismatch("algebra vector of size " + std::to_string(xi.size()) + " for " +
                        std::string(group_name(kind)));
  }
}

void require_same(const GroupElement& a, const GroupElement& b) {
  if (a.kind() != b.kind()) {
    throw GroupMismatch("cannot combine " + std::string(group_name(a.kind())) + " and " +
                        std::string(group_name(b.kind())) + " elements");
  }
}

Eigen::Matrix3d unit(int r, int c) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  m(r, c) = 1.0;
  return m;
}

Basis make_standard(GroupKind kind) {
  switch (kind) {
    case GroupKind::kSO3:
      return Basis({skew(Eigen::Vector3d::UnitX()), skew(Eigen::Vector3d::UnitY()),
                    skew(Eigen::Vector3d::UnitZ())});
    case GroupKind::kSE2: {
      Eigen::Matrix3d rot = Eigen::Matrix3d::Zero();
      rot(0, 1) = -1.0;
      rot(1, 0) = 1.0;
      return Basis({rot, unit(0, 2), unit(1, 2)});
    }
    case GroupKind::kR2:
      return Basis({unit(0, 2), unit(1, 2)});
  }
  throw Error("unknown group kind");
}

}  // namespace

std::string_view group_name(GroupKind kind) {
  switch (kind) {
    case GroupKind::kSO3:
      return "SO3";
    case GroupKind::kSE2:
      return "SE2";
    case GroupKind::kR2:
      return "R2";
  }
  return "?";
}

int group_dim(GroupKind kind) {
  switch (kind) {
    case GroupKind::kSO3:
      return SO3::kDim;
    case GroupKind::kSE2:
      return SE2::kDim;
    case GroupKind::kR2:
      return R2::kDim;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// GroupElement

GroupElement GroupElement::identity(GroupKind kind) {
  switch (kind) {
    case GroupKind::kSO3:
      return SO3();
    case GroupKind::kSE2:
      return SE2();
    case GroupKind::kR2:
      return R2();
  }
  throw Error("unknown group kind");
}

const SO3& GroupElement::so3() const {
  if (const auto* g = std::get_if<SO3>(&v_)) return *g;
  throw GroupMismatch("element is not on SO3");
}

const SE2& GroupElement::se2() const {
  if (const auto* g = std::get_if<SE2>(&v_)) return *g;
  throw GroupMismatch("element is not on SE2");
}

const R2& GroupElement::r2() const {
  if (const auto* g = std::get_if<R2>(&v_)) return *g;
  throw GroupMismatch("element is not on R2");
}

Eigen::Matrix3d GroupElement::matrix() const {
  return visit([](const auto& g) -> Eigen::Matrix3d { return g.matrix(); });
}

Vector GroupElement::params() const {
  return visit(overloaded{
      [](const SO3& g) -> Vector {
        const auto& q = g.quaternion();
        return Eigen::Vector4d(q.w(), q.x(), q.y(), q.z());
      },
      [](const SE2& g) -> Vector {
        return Eigen::Vector3d(g.theta(), g.translation().x(), g.translation().y());
      },
      [](const R2& g) -> Vector { return g.translation(); },
  });
}

Vector GroupElement::canonical_params() const {
  if (kind() == GroupKind::kSO3) {
    const auto q = so3().canonical();
    return Eigen::Vector4d(q.w(), q.x(), q.y(), q.z());
  }
  return params();
}

GroupElement GroupElement::from_params(GroupKind kind, const Vector& p) {
  const int expected = kind == GroupKind::kSO3 ? 4 : group_dim(kind);
  if (p.size() != expected) {
    throw GroupMismatch("expected " + std::to_string(expected) + " parameters for " +
                        std::string(group_name(kind)));
  }
  switch (kind) {
    case GroupKind::kSO3:
      return SO3(Eigen::Quaterniond(p(0), p(1), p(2), p(3)));
    case GroupKind::kSE2:
      return SE2(p(0), p.tail<2>());
    case GroupKind::kR2:
      return R2(p.head<2>());
  }
  throw Error("unknown group kind");
}

// ---------------------------------------------------------------------------
// Operations

GroupElement compose(const GroupElement& g1, const GroupElement& g2) {
  require_same(g1, g2);
  switch (g1.kind()) {
    case GroupKind::kSO3:
      return g1.so3() * g2.so3();
    case GroupKind::kSE2:
      return g1.se2() * g2.se2();
    case GroupKind::kR2:
      return g1.r2() * g2.r2();
  }
  throw Error("unknown group kind");
}

GroupElement inverse(const GroupElement& g) {
  return g.visit([](const auto& h) -> GroupElement { return h.inverse(); });
}

GroupElement exp(GroupKind kind, const AlgebraVector& xi) {
  require_dim(kind, xi);
  switch (kind) {
    case GroupKind::kSO3:
      return SO3::exp(Eigen::Vector3d(xi));
    case GroupKind::kSE2:
      return SE2::exp(Eigen::Vector3d(xi));
    case GroupKind::kR2:
      return R2::exp(Eigen::Vector2d(xi));
  }
  throw Error("unknown group kind");
}

AlgebraVector log(const GroupElement& g) {
  return g.visit([](const auto& h) -> AlgebraVector { return h.log(); });
}

Matrix adjoint(const GroupElement& g) {
  return g.visit([](const auto& h) -> Matrix { return h.adjoint(); });
}

AlgebraVector GroupVelocity::body_at(const GroupElement& x) const {
  if (spatial.isZero(0.0)) return body;
  return body + adjoint(x) * spatial;
}

double distance(const GroupElement& a, const GroupElement& b) {
  require_same(a, b);
  Vector pa = a.canonical_params();
  Vector pb = b.canonical_params();
  if (a.kind() == GroupKind::kSE2) pb(0) = pa(0) + wrap_angle(pb(0) - pa(0));
  return (pa - pb).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Basis and structure constants

Basis::Basis(std::vector<Eigen::Matrix3d> generators) : generators_(std::move(generators)) {
  const int n = size();
  Matrix stacked(9, n);
  for (int i = 0; i < n; ++i) {
    stacked.col(i) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(generators_[i].data());
  }
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double tol = 1e-10 * (sv.size() > 0 ? std::max(1.0, sv(0)) : 1.0);
  rank_ = 0;
  Matrix inv_s = Matrix::Zero(n, n);
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) {
      ++rank_;
      inv_s(i, i) = 1.0 / sv(i);
    }
  }
  pinv_ = svd.matrixV() * inv_s * svd.matrixU().transpose();
}

const Basis& Basis::standard(GroupKind kind) {
  static const std::array<Basis, 3> bases = {make_standard(GroupKind::kSO3),
                                             make_standard(GroupKind::kSE2),
                                             make_standard(GroupKind::kR2)};
  return bases[static_cast<size_t>(kind)];
}

Eigen::Matrix3d Basis::hat(const AlgebraVector& xi) const {
  if (xi.size() != size()) throw GroupMismatch("algebra vector size does not match basis");
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (int i = 0; i < size(); ++i) m += xi(i) * generators_[i];
  return m;
}

AlgebraVector Basis::coordinates(const Eigen::Matrix3d& m) const {
  if (!independent()) throw SingularBasis("basis generators are linearly dependent");
  return pinv_ * Eigen::Map<const Eigen::Matrix<double, 9, 1>>(m.data());
}

Matrix StructureConstants::ad(const AlgebraVector& xi) const {
  Matrix out = Matrix::Zero(n_, n_);
  for (int i = 0; i < n_; ++i) {
    if (xi(i) == 0.0) continue;
    for (int j = 0; j < n_; ++j) {
      for (int k = 0; k < n_; ++k) out(k, j) += xi(i) * (*this)(i, j, k);
    }
  }
  return out;
}

AlgebraVector StructureConstants::bracket(const AlgebraVector& a, const AlgebraVector& b) const {
  return ad(a) * b;
}

StructureConstants structure_constants(const Basis& basis) {
  if (!basis.independent()) throw SingularBasis("basis generators are linearly dependent");
  const int n = basis.size();
  const auto& w = basis.generators();
  StructureConstants c(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const AlgebraVector coords = basis.coordinates(w[i] * w[j] - w[j] * w[i]);
      for (int k = 0; k < n; ++k) {
        c(i, j, k) = coords(k);
        c(j, i, k) = -coords(k);
      }
    }
  }
  return c;
}

const StructureConstants& structure_constants(GroupKind kind) {
  static const std::array<StructureConstants, 3> table = {
      structure_constants(Basis::standard(GroupKind::kSO3)),
      structure_constants(Basis::standard(GroupKind::kSE2)),
      structure_constants(Basis::standard(GroupKind::kR2))};
  return table[static_cast<size_t>(kind)];
}

AlgebraVector bracket(GroupKind kind, const AlgebraVector& a, const AlgebraVector& b) {
  require_dim(kind, a);
  require_dim(kind, b);
  const Basis& basis = Basis::standard(kind);
  const Eigen::Matrix3d ha = basis.hat(a);
  const Eigen::Matrix3d hb = basis.hat(b);
  return basis.coordinates(ha * hb - hb * ha);
}

AlgebraVector random_algebra(GroupKind kind, std::mt19937_64& rng, double max_norm) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, max_norm);
  AlgebraVector dir(group_dim(kind));
  for (int i = 0; i < dir.size(); ++i) dir(i) = normal(rng);
  const double len = dir.norm();
  if (len == 0.0) return dir;
  return dir * (uniform(rng) / len);
}

GroupElement random_element(GroupKind kind, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  switch (kind) {
    case GroupKind::kSO3: {
      const double w = normal(rng), x = normal(rng), y = normal(rng), z = normal(rng);
      return SO3(Eigen::Quaterniond(w, x, y, z));
    }
    case GroupKind::kSE2: {
      std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
      const double th = angle(rng);
      const double tx = normal(rng), ty = normal(rng);
      return SE2(th, Eigen::Vector2d(tx, ty));
    }
    case GroupKind::kR2: {
      const double tx = normal(rng), ty = normal(rng);
      return R2(Eigen::Vector2d(tx, ty));
    }
  }
  throw Error("unknown group kind");
}

}  // namespace invobs
