#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "omnisafe/base_model.hpp"

namespace omnisafe {
namespace {

BaseParams unit_params() {
  BaseParams p;
  p.wheel_center_radius = 1.0;
  p.wheel_radius = 1.0;
  p.roller_radius = 1.0;
  return p;
}

TEST(BaseJacobians, RowsAtZeroAndQuarterTurn) {
  const BaseParams p = unit_params();
  BaseJacobians j = base_jacobians(p, 0.0);
  EXPECT_NEAR((j.Jcw.row(0) - Eigen::RowVector3d(0, 1, 1)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((j.Jcr.row(0) - Eigen::RowVector3d(1, 0, 0)).norm(), 0.0, 1e-15);
  j = base_jacobians(p, kPi / 2);
  EXPECT_NEAR((j.Jcw.row(0) - Eigen::RowVector3d(-1, 0, 1)).norm(), 0.0,
              1e-15);
  EXPECT_EQ((j.Jc.block<3, 3>(0, 3) + Mat3::Identity()).norm(), 0.0);
  EXPECT_EQ((j.Jc.block<3, 3>(3, 6) + Mat3::Identity()).norm(), 0.0);
  EXPECT_EQ((j.Jc.block<3, 3>(0, 6)).norm(), 0.0);
  EXPECT_EQ((j.Jc.block<3, 3>(3, 3)).norm(), 0.0);
}

TEST(BaseJacobians, DerivativeMatchesFiniteDifference) {
  const BaseParams p;
  const double th = 0.3, thd = 0.7, h = 1e-6;
  const BaseJacobians jd = base_jacobians_dot(p, th, thd);
  const BaseJacobians jp = base_jacobians(p, th + thd * h);
  const BaseJacobians jm = base_jacobians(p, th - thd * h);
  const Mat3 fd_w = (jp.Jcw - jm.Jcw) / (2 * h);
  const Mat3 fd_r = (jp.Jcr - jm.Jcr) / (2 * h);
  EXPECT_LT((fd_w - jd.Jcw).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((fd_r - jd.Jcr).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Gravity, AsWrittenForm) {
  BaseParams p;
  EXPECT_EQ(gravity_vector(p, SlopeSpec{}).norm(), 0.0);
  SlopeSpec s = SlopeSpec::incline(0.0);
  Vec9 g = gravity_vector(p, s);
  EXPECT_DOUBLE_EQ(g(0), p.mass * s.gravity);
  EXPECT_DOUBLE_EQ(g(1), 0.0);
  s.angle = 10.0 * kPi / 180.0;
  g = gravity_vector(p, s);
  EXPECT_NEAR(g(0), 386.44, 5e-3);
  EXPECT_EQ(g.tail<7>().norm(), 0.0);
  s.heading = kPi / 2;
  g = gravity_vector(p, s);
  EXPECT_NEAR(g(0), 0.0, 1e-12);
  EXPECT_NEAR(g(1), p.mass * s.gravity * std::cos(s.angle), 1e-12);
}

TEST(Gravity, PhysicalConventionUsesSine) {
  BaseParams p;
  const SlopeSpec s = SlopeSpec::incline(10.0 * kPi / 180.0, 0.0,
                                         GravityConvention::kPhysical);
  EXPECT_NEAR(gravity_vector(p, s)(0), 40 * 9.81 * std::sin(s.angle), 1e-12);
}

TEST(Gravity, RejectsVerticalSlope) {
  SlopeSpec s;
  s.angle = kPi / 2;
  EXPECT_THROW(s.validate(), InputError);
}

TEST(RollerFriction, Values) {
  RollerFrictionParams f;
  EXPECT_EQ(roller_friction(f, Vec3::Zero()).norm(), 0.0);
  EXPECT_NEAR(roller_friction(f, Vec3::Constant(1e6))(0), 0.2, 1e-15);
  EXPECT_NEAR(roller_friction(f, Vec3(2.5, 0, 0))(0), 0.15232, 1e-5);
}

TEST(RollerFriction, OddBoundedMonotone) {
  RollerFrictionParams f;
  double prev = -1.0;
  for (double v = -50.0; v <= 50.0; v += 0.25) {
    const Vec3 b = roller_friction(f, Vec3(v, -v, 0.5 * v));
    const Vec3 bm = roller_friction(f, Vec3(-v, v, -0.5 * v));
    EXPECT_NEAR((b + bm).norm(), 0.0, 1e-15);
    EXPECT_LE(b.cwiseAbs().maxCoeff(), f.magnitude);
    EXPECT_GE(b(0), prev);
    prev = b(0);
  }
}

// Reduced (x, y, theta) model with wheel and roller coordinates eliminated.
Vec3 reduced_accel(const BaseParams& p, const RollerFrictionParams& f,
                   const SlopeSpec& slope, const Vec3& pose,
                   const Vec3& pose_dot, const Vec3& torques,
                   const std::optional<ExternalWrench>& ext) {
  const double th = pose(2);
  Mat3 jw, jr, jwd, jrd;
  for (int i = 0; i < 3; ++i) {
    const double a = th + 2.0 * kPi * i / 3.0;
    jw.row(i) << -std::sin(a), std::cos(a), p.wheel_center_radius;
    jr.row(i) << std::cos(a), std::sin(a), 0.0;
    jwd.row(i) << -std::cos(a), -std::sin(a), 0.0;
    jrd.row(i) << -std::sin(a), std::cos(a), 0.0;
  }
  jw /= p.wheel_radius;
  jr /= p.roller_radius;
  jwd *= pose_dot(2) / p.wheel_radius;
  jrd *= pose_dot(2) / p.roller_radius;
  const Mat3 mb = Vec3(p.mass, p.mass, p.body_inertia).asDiagonal();
  const Mat3 mred = mb + p.wheel_inertia * jw.transpose() * jw +
                    p.roller_inertia * jr.transpose() * jr;
  const Vec3 c = (p.wheel_inertia * jw.transpose() * jwd +
                  p.roller_inertia * jr.transpose() * jrd) *
                 pose_dot;
  const Vec3 qr_dot = jr * pose_dot;
  const Vec3 br = f.magnitude * (f.scaling * qr_dot).array().tanh().matrix();
  Vec3 rhs = jw.transpose() * torques - jr.transpose() * br -
             gravity_vector(p, slope).head<3>() - c;
  if (ext) {
    Mat3 je = Mat3::Identity();
    je(0, 2) = pose(1) - ext->point(1);
    je(1, 2) = ext->point(0) - pose(0);
    rhs += je.transpose() * Vec3(ext->force(0), ext->force(1), ext->moment);
  }
  return mred.ldlt().solve(rhs);
}

TEST(ForwardDynamics, EquilibriumAtRest) {
  const BaseParams p;
  const DynamicsSolution d =
      forward_dynamics(p, {}, {}, BaseState{}, Vec3::Zero());
  EXPECT_LT(d.qdd.norm(), 1e-14);
  EXPECT_LT(d.lambda_w.norm() + d.lambda_r.norm(), 1e-14);
}

TEST(ForwardDynamics, CenterPushMatchesReducedModel) {
  const BaseParams p;
  ExternalWrench w;
  w.force = Vec2(10.0, 0.0);
  const DynamicsSolution d =
      forward_dynamics(p, {}, {}, BaseState{}, Vec3::Zero(), w);
  const Vec3 ref =
      reduced_accel(p, {}, {}, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), w);
  EXPECT_LT((d.qdd.head<3>() - ref).norm(), 1e-10);
  EXPECT_GT(d.qdd(0), 0.0);
}

TEST(ForwardDynamics, EqualTorquesSpinInPlace) {
  const BaseParams p;
  const DynamicsSolution d =
      forward_dynamics(p, {}, {}, BaseState{}, Vec3::Constant(0.7));
  EXPECT_NEAR(d.qdd(0), 0.0, 1e-13);
  EXPECT_NEAR(d.qdd(1), 0.0, 1e-13);
  EXPECT_GT(std::abs(d.qdd(2)), 1e-3);
}

TEST(ForwardDynamics, RandomStatesMatchReducedModelAndConstraints) {
  const BaseParams p;
  RollerFrictionParams f;
  const SlopeSpec slope = SlopeSpec::incline(0.2, 0.4);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const Vec3 pose(u(rng), u(rng), 3 * u(rng));
    const Vec3 vel(u(rng), u(rng), 2 * u(rng));
    const BaseState s = consistent_state(p, pose, vel);
    const Vec3 tq(5 * u(rng), 5 * u(rng), 5 * u(rng));
    ExternalWrench w;
    w.force = Vec2(20 * u(rng), 20 * u(rng));
    w.moment = u(rng);
    w.point = Vec2(pose(0) + 0.3 * u(rng), pose(1) + 0.3 * u(rng));
    const DynamicsSolution d = forward_dynamics(p, f, slope, s, tq, w);
    const Vec3 ref = reduced_accel(p, f, slope, pose, vel, tq, w);
    EXPECT_LT((d.qdd.head<3>() - ref).cwiseAbs().maxCoeff(), 1e-8);
    const BaseJacobians j = base_jacobians(p, pose(2));
    const BaseJacobians jd = base_jacobians_dot(p, pose(2), vel(2));
    EXPECT_LT((j.Jc * d.qdd + jd.Jc * s.qdot()).cwiseAbs().maxCoeff(), 1e-8);
    // Wheel and roller rows of the dynamics give the multipliers directly.
    EXPECT_LT((d.lambda_w - (p.wheel_inertia * d.qdd.segment<3>(3) - tq))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-9);
    EXPECT_LT((d.lambda_r - (p.roller_inertia * d.qdd.segment<3>(6) +
                             roller_friction(f, s.qr_dot)))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-9);
  }
}

TEST(ForwardDynamics, KineticEnergyConservedWithoutFriction) {
  const BaseParams p;
  RollerFrictionParams f;
  f.magnitude = 0.0;
  BaseState s = consistent_state(p, Vec3::Zero(), Vec3(0.3, -0.2, 0.8));
  const double e0 = kinetic_energy(p, s);
  const double dt = 1e-4;
  for (int i = 0; i < 20000; ++i) {
    const DynamicsSolution d = forward_dynamics(p, f, {}, s, Vec3::Zero());
    integrate_semi_implicit(p, s, d.qdd, dt);
  }
  EXPECT_NEAR(kinetic_energy(p, s) / e0, 1.0, 1e-3);
  EXPECT_LT(rolling_residual(p, s), 1e-9);
}

TEST(BodyAccel, ZeroWheelAccelAtRestSpin) {
  const BaseParams p;
  const BodyAccel a = body_accel_from_wheels(p, 0.4, 0.0, Vec3(1, 2, 3),
                                             Vec3::Zero());
  EXPECT_LT(a.xdd.norm(), 1e-14);
}

TEST(BodyAccel, InverseDerivativeIdentity) {
  const BaseParams p;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 50; ++k) {
    const double th = u(rng), thd = u(rng), h = 1e-6;
    const Mat3 jinv = base_jacobians(p, th).Jcw.inverse();
    const Mat3 fd = (base_jacobians(p, th + thd * h).Jcw.inverse() -
                     base_jacobians(p, th - thd * h).Jcw.inverse()) /
                    (2 * h);
    const Mat3 analytic = -jinv * base_jacobians_dot(p, th, thd).Jcw * jinv;
    EXPECT_LT((fd - analytic).cwiseAbs().maxCoeff(),
              1e-9 * std::max(1.0, analytic.cwiseAbs().maxCoeff()) + 1e-8);
  }
}

TEST(BodyAccel, CalibrationSinusoidMatchesFiniteDifferences) {
  const BaseParams p;
  const double omega = 0.5;
  const double w = 2 * kPi * omega;
  auto qw_dot = [&](double t) { return Vec3(1.5 * w * std::sin(w * t), 0, 0); };
  auto qw_dd = [&](double t) {
    return Vec3(1.5 * w * w * std::cos(w * t), 0, 0);
  };
  // theta(t) by RK4 on theta_dot = row 3 of Jcw^-1 qw_dot.
  auto thdot = [&](double th, double t) {
    return body_velocity_from_wheels(p, th, qw_dot(t))(2);
  };
  const double dt = 1e-5;
  std::vector<double> theta{0.0};
  for (int i = 0; i < 200000; ++i) {
    const double t = i * dt, th = theta.back();
    const double k1 = thdot(th, t);
    const double k2 = thdot(th + 0.5 * dt * k1, t + 0.5 * dt);
    const double k3 = thdot(th + 0.5 * dt * k2, t + 0.5 * dt);
    const double k4 = thdot(th + dt * k3, t + dt);
    theta.push_back(th + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6);
  }
  auto xdot = [&](int i) {
    return body_velocity_from_wheels(p, theta[i], qw_dot(i * dt));
  };
  for (int i = 1000; i < 199000; i += 7919) {
    const int h = 100;
    const Vec3 fd = (xdot(i + h) - xdot(i - h)) / (2 * h * dt);
    const BodyAccel a = body_accel_from_wheels(p, theta[i], xdot(i)(2),
                                               qw_dot(i * dt), qw_dd(i * dt));
    EXPECT_LT((fd - a.xdd).cwiseAbs().maxCoeff(), 1e-5) << "i=" << i;
  }
}

}  // namespace
}  // namespace omnisafe
