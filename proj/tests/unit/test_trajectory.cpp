#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "invobs/examples.hpp"
#include "invobs/integrator.hpp"
#include "invobs/trajectory.hpp"

using namespace invobs;

TEST(PermanentTrajectory, CarStraightLine) {
  const InvariantSystem sys = build_car_system();
  const auto traj = make_permanent(sys, GroupElement::identity(GroupKind::kSE2), Eigen::Vector2d(1, 0), 5);
  const GroupElement x = permanent_state(traj, 2.5);
  EXPECT_LT(distance(x, SE2(0.0, Eigen::Vector2d(2.5, 0))), 1e-15);
}

TEST(PermanentTrajectory, CarCircleCloses) {
  const InvariantSystem sys = build_car_system();
  const GroupElement x0 = SE2(0.7, Eigen::Vector2d(-1, 3));
  const auto traj = make_permanent(sys, x0, Eigen::Vector2d(1, 0.5), 4 * M_PI);
  // radius 2 turning left: half way round the heading flips and the car sits 4 m to its left
  const GroupElement half = permanent_state(traj, 2 * M_PI);
  const Eigen::Vector2d left(-std::sin(0.7), std::cos(0.7));
  EXPECT_LT((half.se2().translation() - (Eigen::Vector2d(-1, 3) + 4 * left)).norm(), 1e-12);
  EXPECT_LT(distance(permanent_state(traj, 4 * M_PI), x0), 1e-8);
}

TEST(PermanentTrajectory, OneParameterSubgroupLaw) {
  std::mt19937_64 rng(71);
  for (const auto& name : {"attitude", "car", "planar"}) {
    const InvariantSystem sys = make_named_system(name);
    const auto traj = make_permanent(sys, random_element(sys.group, rng), default_ubar(name), 10);
    for (int i = 0; i < 10; ++i) {
      const double t = 3 * random_vector(1, rng)(0), s = 3 * random_vector(1, rng)(0);
      EXPECT_LT(distance(permanent_state(traj, t + s),
                         compose(permanent_state(traj, t), exp(sys.group, s * traj.wbar))),
                1e-12)
          << name;
    }
  }
}

TEST(PermanentTrajectory, RequiredInputKeepsInvariantConstant) {
  std::mt19937_64 rng(72);
  for (const auto& name : {"attitude", "car", "planar"}) {
    const InvariantSystem sys = make_named_system(name);
    const Vector ubar = random_vector(sys.input_dim, rng);
    const auto traj = make_permanent(sys, random_element(sys.group, rng), ubar, 10);
    for (double t : {0.0, 0.3, 2.0, 9.5}) {
      const Vector i = invariants_I(sys, permanent_state(traj, t), required_input(sys, traj, t));
      EXPECT_LT((i - ubar).norm(), 1e-12) << name;
    }
  }
}

TEST(PermanentTrajectory, IntegratedFlowFollowsClosedForm) {
  const InvariantSystem sys = build_attitude_system();
  const GroupElement x0 = SO3::exp(Eigen::Vector3d(0.3, -0.2, 1.0));
  const auto traj = make_permanent(sys, x0, Eigen::Vector3d(0.2, 0.5, -0.4), 5);
  const InputSignal u = InputSignal::function(3, [&](double t) { return required_input(sys, traj, t); });
  const TimeSeries ts = integrate(sys, std::nullopt, x0, std::nullopt, u, 5, {});
  EXPECT_LT(distance(ts.x.back(), permanent_state(traj, 5)), 1e-10);
  EXPECT_TRUE(is_permanent(sys, ts.t, ts.x, u).permanent);
}

TEST(IsPermanent, SinusoidalSteeringIsNot) {
  const InvariantSystem sys = build_car_system();
  CarConfig cfg;
  cfg.steering_rate = [](double t) { return 0.4 * std::sin(t); };
  const InputSignal u = car_inputs(cfg);
  const TimeSeries ts = integrate(sys, std::nullopt, GroupElement::identity(GroupKind::kSE2), std::nullopt,
                                  u, 5, {});
  const PermanenceVerdict v = is_permanent(sys, ts.t, ts.x, u);
  EXPECT_FALSE(v.permanent);
  EXPECT_GT(v.max_deviation, 0.3);
}

TEST(IsPermanent, ConstantInputsAre) {
  const InvariantSystem sys = build_car_system();
  const InputSignal u = InputSignal::constant(Eigen::Vector2d(1.5, -0.3));
  const TimeSeries ts = integrate(sys, std::nullopt, SE2(1.0, Eigen::Vector2d(4, 4)), std::nullopt, u, 3, {});
  const PermanenceVerdict v = is_permanent(sys, ts.t, ts.x, u);
  EXPECT_TRUE(v.permanent);
  EXPECT_EQ(v.max_deviation, 0.0);
}

TEST(Linearize, SameAlongAPermanentTrajectory) {
  // the linearized pair only depends on the invariant input, so it does not
  // change in time along a permanent trajectory
  const InvariantSystem sys = build_car_system();
  const auto traj = make_permanent(sys, SE2(0.2, Eigen::Vector2d(1, 1)), Eigen::Vector2d(1, 0.5), 10);
  const LinearizedPair first =
      linearize(sys, invariants_I(sys, permanent_state(traj, 0), required_input(sys, traj, 0)));
  for (double t : {1.0, 4.0, 7.3}) {
    const LinearizedPair later =
        linearize(sys, invariants_I(sys, permanent_state(traj, t), required_input(sys, traj, t)));
    EXPECT_LT((later.A - first.A).norm(), 1e-12);
    EXPECT_LT((later.C - first.C).norm(), 1e-12);
  }
}
