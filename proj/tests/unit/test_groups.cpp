#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "invobs/lie.hpp"
#include "oracles.hpp"

using namespace invobs;
constexpr double kPi = std::numbers::pi;

TEST(So3Rotate, IdentityLeavesVector) {
  const Eigen::Vector3d v(1.0, -2.0, 0.5);
  EXPECT_EQ(so3_rotate(SO3(), v), v);
}

TEST(So3Rotate, QuarterTurnAboutZ) {
  const SO3 g = SO3::exp(Eigen::Vector3d(0, 0, kPi / 2));
  const Eigen::Quaterniond q = g.canonical();
  const Eigen::Vector3d expected =
      oracle::quat_matrix(Eigen::Vector4d(q.w(), q.x(), q.y(), q.z())) * Eigen::Vector3d::UnitX();
  EXPECT_TRUE(so3_rotate(g, Eigen::Vector3d::UnitX()).isApprox(Eigen::Vector3d::UnitY(), 1e-15));
  EXPECT_TRUE(expected.isApprox(Eigen::Vector3d::UnitY(), 1e-15));
}

TEST(So3Rotate, PreservesNorm) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n;
  for (int i = 0; i < 200; ++i) {
    const SO3 g = random_element(GroupKind::kSO3, rng).so3();
    const Eigen::Vector3d v(n(rng), n(rng), n(rng));
    EXPECT_NEAR(so3_rotate(g, v).norm(), v.norm(), 1e-14 * (1 + v.norm()));
  }
}

TEST(So3, QuaternionStaysUnit) {
  std::mt19937_64 rng(32);
  SO3 g;
  for (int i = 0; i < 10000; ++i) g = g * random_element(GroupKind::kSO3, rng).so3();
  EXPECT_NEAR(g.quaternion().norm(), 1.0, 1e-12);
}

TEST(So3, RepeatedSmallTurnsAddUp) {
  const double alpha = 0.3;
  SO3 g;
  for (int k = 1; k <= 10; ++k) {
    g = g * SO3::exp(Eigen::Vector3d(0, 0, alpha));
    const GroupElement expected = SO3::exp(Eigen::Vector3d(0, 0, k * alpha));
    EXPECT_LT(distance(g, expected), 1e-9) << k;
  }
}

TEST(So3, CanonicalHasNonNegativeScalar) {
  const SO3 g(Eigen::Quaterniond(-0.5, 0.5, 0.5, 0.5));
  EXPECT_GE(g.canonical().w(), 0.0);
  EXPECT_LT(distance(g, SO3(Eigen::Quaterniond(0.5, -0.5, -0.5, -0.5))), 1e-15);
}

TEST(Se2Apply, IdentityLeavesPoint) {
  const Eigen::Vector2d p(3.0, -1.0);
  EXPECT_EQ(se2_apply(SE2(), p), p);
}

TEST(Se2Apply, QuarterTurnThenShift) {
  const SE2 g(kPi / 2, Eigen::Vector2d(1, 0));
  const Eigen::Vector3d homog = g.matrix() * Eigen::Vector3d(1, 0, 1);
  EXPECT_TRUE(homog.head<2>().isApprox(Eigen::Vector2d(1, 1), 1e-15));
  EXPECT_TRUE(se2_apply(g, Eigen::Vector2d(1, 0)).isApprox(Eigen::Vector2d(1, 1), 1e-15));
}

TEST(Se2Apply, IsAnAction) {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 100; ++i) {
    const SE2 a = random_element(GroupKind::kSE2, rng).se2();
    const SE2 b = random_element(GroupKind::kSE2, rng).se2();
    const Eigen::Vector2d p(0.3 * i, -1.0);
    EXPECT_LT((se2_apply(a * b, p) - se2_apply(a, se2_apply(b, p))).norm(), 1e-12);
  }
}

TEST(Se2, AngleIsWrapped) {
  EXPECT_NEAR(SE2(3 * kPi / 2, Eigen::Vector2d::Zero()).theta(), -kPi / 2, 1e-15);
  EXPECT_NEAR(SE2(-kPi, Eigen::Vector2d::Zero()).theta(), kPi, 1e-15);
  EXPECT_NEAR(wrap_angle(kPi), kPi, 0.0);
}

TEST(Se2, AdjointClosedForm) {
  // psi_g = Ad_{g^-1} in the basis (rot, tx, ty)
  std::mt19937_64 rng(34);
  for (int i = 0; i < 100; ++i) {
    const SE2 g = random_element(GroupKind::kSE2, rng).se2();
    const double c = std::cos(g.theta()), s = std::sin(g.theta());
    const double tx = g.translation().x(), ty = g.translation().y();
    Eigen::Matrix3d expected;
    expected << 1, 0, 0, s * tx - c * ty, c, s, c * tx + s * ty, -s, c;
    EXPECT_LT((adjoint(GroupElement(g)) - expected).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(R2, IsAbelian) {
  std::mt19937_64 rng(35);
  const GroupElement a = random_element(GroupKind::kR2, rng), b = random_element(GroupKind::kR2, rng);
  EXPECT_EQ(distance(compose(a, b), compose(b, a)), 0.0);
  EXPECT_TRUE(adjoint(a).isIdentity(0.0));
}
