#include <gtest/gtest.h>

#include <cmath>

#include "invobs/errors.hpp"
#include "invobs/examples.hpp"
#include "invobs/integrator.hpp"

using namespace invobs;

namespace {

IntegratorConfig with(Method m, double dt) {
  IntegratorConfig cfg;
  cfg.method = m;
  cfg.dt = dt;
  return cfg;
}

// A state- and time-dependent field with both body and spatial parts.
GroupVelocity wobble(double t, const GroupElement& x) {
  const Eigen::Matrix3d r = x.matrix();
  GroupVelocity v;
  v.body = Eigen::Vector3d(std::sin(t), r(0, 1), 1.0);
  v.spatial = Eigen::Vector3d(0.3 * r(2, 2), -0.2, 0.5 * std::cos(2 * t));
  return v;
}

GroupElement run(Method m, double dt, double duration) {
  const auto cfg = with(m, dt);
  GroupElement x = SO3::exp(Eigen::Vector3d(0.1, 0.2, 0.3));
  const auto n = step_count(duration, dt);
  for (std::int64_t k = 0; k < n; ++k) x = step_group(x, wobble, k * dt, cfg);
  return x;
}

}  // namespace

TEST(StepGroup, ZeroFieldIsIdentityMap) {
  const GroupElement x = SE2(0.4, Eigen::Vector2d(1, 2));
  for (Method m : {Method::kLieEuler, Method::kRkmk4}) {
    const GroupElement y = step_group(
        x, [](double, const GroupElement&) { return GroupVelocity::left(Vector::Zero(3)); }, 0.0,
        with(m, 0.1));
    EXPECT_EQ(distance(x, y), 0.0);
  }
}

TEST(StepGroup, ConstantBodyVelocityIsExact) {
  const Vector w = Eigen::Vector3d(0.3, 1.0, -0.5);
  for (Method m : {Method::kLieEuler, Method::kRkmk4}) {
    GroupElement x = GroupElement::identity(GroupKind::kSE2);
    for (int k = 0; k < 100; ++k) {
      x = step_group(x, [&](double, const GroupElement&) { return GroupVelocity::left(w); }, k * 0.01,
                     with(m, 0.01));
    }
    EXPECT_LT(distance(x, exp(GroupKind::kSE2, w)), 1e-13);
  }
}

TEST(StepGroup, FullTurnReturnsHome) {
  const int n = 628;
  const double dt = 2 * M_PI / n;
  const GroupElement start = SO3::exp(Eigen::Vector3d(0.5, -0.1, 0.2));
  GroupElement x = start;
  for (int k = 0; k < n; ++k) {
    x = step_group(
        x, [](double, const GroupElement&) { return GroupVelocity::left(Eigen::Vector3d(0, 0, 1)); },
        k * dt, with(Method::kRkmk4, dt));
  }
  EXPECT_LT(distance(x, start), 1e-8);
}

TEST(StepGroup, ConvergenceOrders) {
  const double duration = 1.0;
  const GroupElement reference = run(Method::kRkmk4, 1e-4, duration);
  auto order = [&](Method m, double dt) {
    const double e1 = distance(run(m, dt, duration), reference);
    const double e2 = distance(run(m, dt / 2, duration), reference);
    return std::log2(e1 / e2);
  };
  const double euler = order(Method::kLieEuler, 0.02);
  EXPECT_GT(euler, 0.9);
  EXPECT_LT(euler, 1.1);
  EXPECT_GE(order(Method::kRkmk4, 0.1), 3.7);
}

TEST(StepGroup, StaysOnTheGroup) {
  GroupElement x = SO3::exp(Eigen::Vector3d(0.1, 0.2, 0.3));
  for (int k = 0; k < 20000; ++k) x = step_group(x, wobble, k * 1e-3, with(Method::kRkmk4, 1e-3));
  const Eigen::Matrix3d r = x.matrix();
  EXPECT_LT((r.transpose() * r - Eigen::Matrix3d::Identity()).norm(), 1e-14);
  EXPECT_NEAR(r.determinant(), 1.0, 1e-14);
}

TEST(StepGroup, NonFiniteVelocityIsRejected) {
  const auto bad = [](double, const GroupElement&) {
    return GroupVelocity::left(Eigen::Vector3d(0, NAN, 0));
  };
  for (Method m : {Method::kLieEuler, Method::kRkmk4}) {
    EXPECT_THROW(step_group(GroupElement::identity(GroupKind::kSO3), bad, 0.0, with(m, 0.1)), StepRejected);
  }
}

TEST(StepCount, WholeStepsOnly) {
  EXPECT_EQ(step_count(1.0, 0.1), 10);
  EXPECT_EQ(step_count(10.0, 1e-3), 10000);
  EXPECT_THROW(step_count(0.0, 0.1), ValidationError);
  EXPECT_THROW(step_count(1.0, 0.3), ValidationError);
  EXPECT_THROW(step_count(1.0, 0.0), ValidationError);
  EXPECT_THROW(step_count(-1.0, 0.1), ValidationError);
}

TEST(Method, Names) {
  EXPECT_EQ(parse_method("lie-euler"), Method::kLieEuler);
  EXPECT_EQ(parse_method("rkmk4"), Method::kRkmk4);
  EXPECT_EQ(method_name(Method::kRkmk4), "rkmk4");
  EXPECT_THROW(parse_method("euler"), ValidationError);
  IntegratorConfig cfg;
  cfg.dt = -1;
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(Integrate, OpenLoopCarDrivesStraight) {
  const InvariantSystem sys = build_car_system();
  const TimeSeries ts = integrate(sys, std::nullopt, GroupElement::identity(GroupKind::kSE2), std::nullopt,
                                  InputSignal::constant(Eigen::Vector2d(1, 0)), 1.0, with(Method::kRkmk4, 0.1));
  ASSERT_EQ(ts.t.size(), 11u);
  EXPECT_NEAR(ts.t.back(), 1.0, 1e-15);
  EXPECT_LT(distance(ts.x.back(), SE2(0.0, Eigen::Vector2d(1, 0))), 1e-14);
  EXPECT_LT((ts.y.back() - Eigen::Vector2d(1, 0)).norm(), 1e-14);
  EXPECT_TRUE(ts.xhat.empty());
  EXPECT_TRUE(ts.eta.empty());
}

TEST(Integrate, NoiseIsSeededAndOnlyTouchesMeasurements) {
  const InvariantSystem sys = build_car_system();
  const ObserverSpec spec =
      make_observer(sys, design_gain_pole(linearize(sys, Eigen::Vector2d(1, 0)).A,
                                          linearize(sys, Eigen::Vector2d(1, 0)).C, {-1, -2, -3}));
  const auto u = InputSignal::constant(Eigen::Vector2d(1, 0));
  const GroupElement x0 = GroupElement::identity(GroupKind::kSE2);
  const GroupElement xh0 = SE2(0.1, Eigen::Vector2d(0.2, 0));
  const NoiseModel noise{Eigen::Vector2d(0.01, 0.01), 9};
  const TimeSeries a = integrate(sys, spec, x0, xh0, u, 1.0, {}, noise);
  const TimeSeries b = integrate(sys, spec, x0, xh0, u, 1.0, {}, noise);
  const TimeSeries clean = integrate(sys, spec, x0, xh0, u, 1.0, {});
  EXPECT_EQ(distance(a.xhat.back(), b.xhat.back()), 0.0);
  EXPECT_GT(distance(a.xhat.back(), clean.xhat.back()), 1e-6);
  EXPECT_EQ(distance(a.x.back(), clean.x.back()), 0.0);
}

TEST(Integrate, MismatchedStartIsRejected) {
  const InvariantSystem sys = build_car_system();
  EXPECT_THROW(integrate(sys, std::nullopt, GroupElement::identity(GroupKind::kSO3), std::nullopt,
                         InputSignal::constant(Eigen::Vector2d(1, 0)), 1.0, {}),
               GroupMismatch);
}
