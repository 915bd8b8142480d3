#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "invobs/errors.hpp"
#include "invobs/examples.hpp"
#include "invobs/integrator.hpp"

using namespace invobs;

namespace {

// Closed-loop matrix of the attitude observer written out by hand:
// -sum_i k_i (|v_i|^2 I - v_i v_i^T).
Eigen::Matrix3d attitude_flow_oracle(const AttitudeConfig& cfg, double kg, double kb) {
  const Eigen::Matrix3d eye = Eigen::Matrix3d::Identity();
  const Eigen::Vector3d g = cfg.gravity, b = cfg.magnetic;
  return -(kg * (g.squaredNorm() * eye - g * g.transpose()) + kb * (b.squaredNorm() * eye - b * b.transpose()));
}

ObserverSpec car_observer() {
  const InvariantSystem sys = build_car_system();
  const LinearizedPair p = linearize(sys, Eigen::Vector2d(1, 0));
  return make_observer(sys, design_gain_pole(p.A, p.C, {-1, -2, -3}));
}

}  // namespace

TEST(Attitude, FieldFromDip) {
  const Eigen::Vector3d b = AttitudeConfig::field_from_dip(60.0);
  EXPECT_NEAR(b.norm(), 1.0, 1e-15);
  EXPECT_NEAR(b.x(), 0.5, 1e-15);
  EXPECT_NEAR(b.z(), std::sqrt(3.0) / 2, 1e-15);
}

TEST(Attitude, DefaultObserverEigenvalues) {
  const AttitudeConfig cfg;
  const InvariantSystem sys = build_attitude_system(cfg);
  const LinearizedPair p = linearize(sys, design_gain_adjoint(sys, Vector::Constant(1, 2.0)), Vector::Zero(3));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(attitude_flow_oracle(cfg, 2.0, 2.0));
  const auto eig = sorted_eigenvalues(p.closed_loop());
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(eig[i].real(), es.eigenvalues()(i), 1e-8);
    EXPECT_EQ(eig[i].imag(), 0.0);
    EXPECT_LT(eig[i].real(), 0.0);
  }
  // the slow direction is close to heading, at roughly K |B_horizontal|^2
  EXPECT_NEAR(es.eigenvalues()(2), -2.0 * 0.25, 0.01);
  EXPECT_NEAR(std::abs(es.eigenvectors().col(2).dot(cfg.gravity.normalized())), 1.0, 1e-2);
}

TEST(Attitude, PerSensorWeights) {
  AttitudeConfig cfg;
  cfg.gain_gravity = 0.1;
  cfg.gain_magnetic = 3.0;
  const InvariantSystem sys = build_attitude_system(cfg);
  const LinearizedPair p = linearize(sys, default_attitude_observer(cfg), Vector::Zero(3));
  EXPECT_LT((p.closed_loop() - attitude_flow_oracle(cfg, 0.1, 3.0)).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Attitude, ErrorIgnoresTheInputProfile) {
  const InvariantSystem sys = build_attitude_system();
  const ObserverSpec spec = default_attitude_observer();
  const GroupElement eta0 = SO3::exp(Eigen::Vector3d(0.3, -0.4, 0.2));
  const auto run = [&](const InputSignal& u, const GroupElement& x0) {
    return integrate(sys, spec, x0, compose(eta0, x0), u, 10.0, {});
  };
  const TimeSeries a = run(InputSignal::constant(Eigen::Vector3d(0, 0, 0)), GroupElement::identity(GroupKind::kSO3));
  const TimeSeries b = run(InputSignal::function(3,
                                                 [](double t) -> Vector {
                                                   return Eigen::Vector3d(std::sin(3 * t), 2.0, -std::cos(t));
                                                 }),
                           SO3::exp(Eigen::Vector3d(1.0, 0.5, -2.0)));
  double worst = 0.0;
  for (size_t k = 0; k < a.eta.size(); ++k) worst = std::max(worst, distance(a.eta[k], b.eta[k]));
  EXPECT_LT(worst, 1e-9);
  EXPECT_GT(distance(a.x.back(), b.x.back()), 0.1);
}

TEST(Attitude, EstimateStaysARotation) {
  const InvariantSystem sys = build_attitude_system();
  const InputSignal u = InputSignal::function(3, [](double t) -> Vector {
    return Eigen::Vector3d(0.4 * std::sin(t), 0.3, 0.2 * std::cos(2 * t));
  });
  const TimeSeries ts = integrate(sys, default_attitude_observer(), GroupElement::identity(GroupKind::kSO3),
                                  SO3::exp(Eigen::Vector3d(0.5, 0.5, 0.5)), u, 100.0, {});
  ASSERT_EQ(ts.xhat.size(), 100001u);
  const Eigen::Matrix3d r = ts.xhat.back().matrix();
  EXPECT_LT((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
}

TEST(Attitude, CollinearReferencesLoseObservability) {
  AttitudeConfig cfg;
  cfg.magnetic = Eigen::Vector3d(0, 0, 1);
  const auto obs = attitude_observability(cfg);
  EXPECT_TRUE(obs.collinear_reference_vectors);
  EXPECT_EQ(obs.report.rank, 2);
  EXPECT_FALSE(obs.observable());
  cfg.magnetic = Eigen::Vector3d(std::sin(1e-4), 0, std::cos(1e-4));
  EXPECT_TRUE(attitude_observability(cfg).collinear_reference_vectors);
  cfg.magnetic = AttitudeConfig::field_from_dip(60.0);
  EXPECT_FALSE(attitude_observability(cfg).collinear_reference_vectors);
}

TEST(Attitude, MagnetometerOnlyKeepsRotationAboutB) {
  AttitudeConfig cfg;
  cfg.magnetometer_only = true;
  const InvariantSystem sys = build_attitude_system(cfg);
  const ObserverSpec spec = default_attitude_observer(cfg);
  const Eigen::Vector3d bhat = cfg.magnetic.normalized();
  const auto eta = integrate_error(sys, spec, SO3::exp(0.2 * bhat + Eigen::Vector3d(0, 0.1, 0)),
                                   [](double) { return Vector(); }, 10.0, {});
  const Vector xi = log(eta.back());
  EXPECT_NEAR(xi.dot(bhat), 0.2, 0.02);
  EXPECT_LT((xi - xi.dot(bhat) * bhat).norm(), 1e-3);
}

TEST(Car, TrajectoryIndependence) {
  const InvariantSystem sys = build_car_system();
  const ObserverSpec spec = car_observer();
  const GroupElement eta0 = exp(GroupKind::kSE2, Eigen::Vector3d(0.05, 0.02, -0.03));
  const auto ua = [](double t) -> Vector { return Eigen::Vector2d(1.0 + 0.3 * std::sin(t), 0.4 * std::cos(0.5 * t)); };
  const GroupElement xa = GroupElement::identity(GroupKind::kSE2);
  const GroupElement xb = SE2(2.0, Eigen::Vector2d(-5, 7));
  // the translated run gets the transformed input, which for the car is the same input
  const TimeSeries a = integrate(sys, spec, xa, compose(xa, eta0), InputSignal::function(2, ua), 10.0, {});
  const TimeSeries b = integrate(sys, spec, xb, compose(xb, eta0),
                                 InputSignal::function(2, [&](double t) { return sys.input_action(xb, ua(t)); }),
                                 10.0, {});
  double worst = 0.0;
  for (size_t k = 0; k < a.eta.size(); ++k) worst = std::max(worst, distance(a.eta[k], b.eta[k]));
  EXPECT_LT(worst, 1e-9);

  // a genuinely different invariant input changes the error trace
  const TimeSeries c = integrate(sys, spec, xa, compose(xa, eta0), InputSignal::constant(Eigen::Vector2d(3.0, -1.0)),
                                 10.0, {});
  double gap = 0.0;
  for (size_t k = 0; k < a.eta.size(); ++k) gap = std::max(gap, distance(a.eta[k], c.eta[k]));
  EXPECT_GT(gap, 1e-3);
}

TEST(Car, CircleErrorDecaysAtSlowestPole) {
  const InvariantSystem sys = build_car_system();
  const Vector ubar = Eigen::Vector2d(1, 0.5);
  const LinearizedPair p = linearize(sys, ubar);
  const ObserverSpec spec = make_observer(sys, design_gain_pole(p.A, p.C, {-1, -2, -3}));
  const auto eta = integrate_error(sys, spec, exp(GroupKind::kSE2, Eigen::Vector3d(0.03, 0.03, 0.02)),
                                   [&](double) { return ubar; }, 10.0, {});
  // late-time rate from two samples five seconds apart
  const double r = std::log(log(eta[5000]).norm() / log(eta[10000]).norm()) / 5.0;
  EXPECT_NEAR(r, 1.0, 0.2);
}

TEST(Planar, ErrorIsLinear) {
  const InvariantSystem sys = build_planar_system();
  const ObserverSpec spec = design_gain_adjoint(sys, Vector::Constant(1, 0.5));
  const auto eta = integrate_error(sys, spec, exp(GroupKind::kR2, Eigen::Vector2d(1, -2)),
                                   [](double) { return Vector(Eigen::Vector2d(3, 3)); }, 2.0, {});
  EXPECT_LT((log(eta.back()) - std::exp(-1.0) * Eigen::Vector2d(1, -2)).norm(), 1e-12);
}

TEST(NamedSystems, AllBuild) {
  for (const auto& name : system_names()) {
    const InvariantSystem sys = make_named_system(name);
    EXPECT_NO_THROW(sys.validate()) << name;
    EXPECT_EQ(default_ubar(name).size(), sys.input_dim) << name;
  }
  EXPECT_THROW(make_named_system("boat"), ValidationError);
}
