#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "omnisafe/contact.hpp"

namespace omnisafe {
namespace {

BaseState random_state(std::mt19937_64& rng, const BaseParams& p) {
  std::normal_distribution<double> g;
  const Vec3 pose(g(rng), g(rng), g(rng));
  const Vec3 vel(0.5 * g(rng), 0.5 * g(rng), 0.5 * g(rng));
  return consistent_state(p, pose, vel);
}

TEST(NominalTorque, RestIsZero) {
  BaseParams p;
  BaseState s;
  EXPECT_LT(nominal_torque(p, {}, s, Vec3::Zero(), Vec3::Zero(), Vec3::Zero())
                .norm(),
            1e-15);
}

TEST(NominalTorque, MatchesAppliedTorqueWithoutContact) {
  BaseParams p;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int k = 0; k < 100; ++k) {
    const BaseState s = random_state(rng, p);
    const Vec3 t(g(rng), g(rng), g(rng));
    const DynamicsSolution d = forward_dynamics(p, {}, {}, s, t);
    const Vec3 tn = nominal_torque(p, {}, s, d.qdd.head<3>(),
                                   d.qdd.segment<3>(3), d.qdd.tail<3>());
    EXPECT_LT((tn - t).norm(), 1e-8);
  }
}

TEST(NominalTorque, SlopeIncludedWhenGiven) {
  BaseParams p;
  const SlopeSpec slope = SlopeSpec::incline(0.1745, 0.3, GravityConvention::kPhysical);
  std::mt19937_64 rng(5);
  const BaseState s = random_state(rng, p);
  const Vec3 t(1.0, -2.0, 0.5);
  const DynamicsSolution d = forward_dynamics(p, {}, slope, s, t);
  const Vec3 tn = nominal_torque(p, {}, s, d.qdd.head<3>(), d.qdd.segment<3>(3),
                                 d.qdd.tail<3>(), slope);
  EXPECT_LT((tn - t).norm(), 1e-8);
}

TEST(NominalTorque, CalibrationSquareWaveFollowsWheelZero) {
  // Wheel 0 swings sinusoidally, the others are held. The friction share of
  // each predicted torque keeps a fixed sign relative to wheel 0's motion.
  BaseParams p;
  RollerFrictionParams fr;
  const double amp = 20.0, w = 2.0 * kPi * 0.5;
  BaseState s;
  Vec3 pattern = Vec3::Zero();
  int checked = 0;
  for (int n = 0; n < 4000; ++n) {
    const double t = n * 1e-3;
    const Vec3 qwd(amp * w * std::cos(w * t), 0, 0);
    const Vec3 qwdd(-amp * w * w * std::sin(w * t), 0, 0);
    s.pose_dot = body_velocity_from_wheels(p, s.pose(2), qwd);
    s.qw_dot = qwd;
    const BaseJacobians j = base_jacobians(p, s.pose(2));
    s.qr_dot = j.Jcr * s.pose_dot;
    const BodyAccel acc =
        body_accel_from_wheels(p, s.pose(2), s.pose_dot(2), qwd, qwdd);
    const Vec3 tn = nominal_torque(p, fr, s, acc.xdd, qwdd, acc.qr_dd);
    const Vec3 inertial = nominal_torque(p, {0.0, 0.4}, s, acc.xdd, qwdd, acc.qr_dd);
    const Vec3 fric = tn - inertial;
    if (std::abs(qwd(0)) > 0.7 * amp * w) {
      for (int i = 0; i < 3; ++i) {
        if (std::abs(fric(i)) < 1e-3) continue;
        const double sgn = (fric(i) > 0) == (qwd(0) > 0) ? 1.0 : -1.0;
        if (pattern(i) == 0.0) pattern(i) = sgn;
        EXPECT_EQ(pattern(i), sgn);
        ++checked;
      }
    }
    s.pose += 1e-3 * s.pose_dot;
  }
  EXPECT_GT(checked, 100);
}

TEST(EstimateWrench, EqualTorquesGiveZero) {
  BaseParams p;
  const Vec3 t(0.3, -0.2, 1.1);
  EXPECT_LT(estimate_wrench(t, t, 0.4, p).norm(), 1e-15);
}

struct PushResult {
  Vec3 estimate;
  Vec3 truth;
  double theta_dd;
  Vec3 qw_dd;
  Vec3 sensed;
};

PushResult simulate_push(const BaseParams& p, const BaseState& s,
                         const Vec3& t, const Vec2& point_body,
                         const Vec2& force_body) {
  const double th = s.pose(2);
  const Vec3 w = boundary_push_wrench(point_body, force_body, th);
  ExternalWrench ext;
  ext.force = w.head<2>();
  const Eigen::Rotation2Dd r(th);
  ext.point = s.pose.head<2>() + r * point_body;
  const DynamicsSolution d = forward_dynamics(p, {}, {}, s, t, ext);
  const Vec3 tn = nominal_torque(p, {}, s, d.qdd.head<3>(), d.qdd.segment<3>(3),
                                 d.qdd.tail<3>());
  return {estimate_wrench(tn, t, th, p), w, d.qdd(2), d.qdd.segment<3>(3), t};
}

TEST(EstimateWrench, CenterPushRecovered) {
  BaseParams p;
  BaseState s;
  const PushResult r = simulate_push(p, s, Vec3::Zero(), Vec2::Zero(), Vec2(10, 0));
  EXPECT_LT((r.estimate - Vec3(10, 0, 0)).norm(), 1e-6);
}

TEST(EstimateWrench, RowThreeIdentity) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  BaseParams p;
  const BodyOutline o = BodyOutline::triangle();
  for (int k = 0; k < 50; ++k) {
    const BaseState s = random_state(rng, p);
    const Vec3 t(g(rng), g(rng), g(rng));
    const Vec2 pt = o.boundary_point(std::uniform_real_distribution<>(0, 1)(rng));
    const PushResult r = simulate_push(p, s, t, pt, -5.0 * o.outward_normal_at(pt));
    EXPECT_NEAR(r.estimate(2), row3_moment(p, r.theta_dd, r.qw_dd, r.sensed), 1e-9);
  }
}

TEST(LocateContact, SymmetricPushHitsMidpoint) {
  const BodyOutline o = BodyOutline::triangle();
  for (std::size_t i = 0; i < 3; ++i) {
    const Vec2 mid = 0.5 * (o.vertices[i] + o.vertices[(i + 1) % 3]);
    const Vec2 n = o.outward_normal_at(mid);
    const ContactPoint cp = locate_contact(Vec3(-3 * n.x(), -3 * n.y(), 0.0), o);
    EXPECT_LT((cp.point - mid).norm(), 1e-12);
    EXPECT_NEAR(cp.magnitude, 3.0, 1e-12);
  }
}

TEST(LocateContact, MissAndFloorErrors) {
  const BodyOutline o = BodyOutline::triangle();
  EXPECT_THROW(locate_contact(Vec3(1, 0, 5.0), o), NoContactPoint);
  EXPECT_THROW(locate_contact(Vec3(0, 0, 0.1), o), NumericalError);
  LocateOptions opt;
  opt.on_miss = MissPolicy::kNearest;
  const ContactPoint cp = locate_contact(Vec3(1, 0, 5.0), o, 0.0, opt);
  EXPECT_TRUE(cp.on_miss_projected);
}

TEST(LocateContact, VertexTangentSnaps) {
  const BodyOutline o = BodyOutline::triangle();
  // Line through vertex 0 perpendicular to its bisector only touches it.
  const Vec2 v = o.vertices[0];
  const Vec2 f(0.0, 4.0);
  const Vec3 w(f.x(), f.y(), v.x() * f.y() - v.y() * f.x());
  const ContactPoint cp = locate_contact(w, o);
  EXPECT_TRUE(cp.snapped_to_vertex);
  EXPECT_LT((cp.point - v).norm(), 1e-12);
}

TEST(LocateContact, RoundTripRandomPushesInSimulation) {
  BaseParams p;
  const BodyOutline o = BodyOutline::triangle();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0, 1);
  std::normal_distribution<double> g;
  for (int k = 0; k < 500; ++k) {
    const BaseState s = random_state(rng, p);
    const Vec3 t(g(rng), g(rng), g(rng));
    const Vec2 pt = o.boundary_point(u(rng));
    const Vec2 n = o.outward_normal_at(pt);
    const double a = std::atan2(-n.y(), -n.x()) + (2 * u(rng) - 1) * kPi / 3.0;
    const double mag = 1.0 + 9.0 * u(rng);
    const Vec2 f = mag * Vec2(std::cos(a), std::sin(a));
    const PushResult r = simulate_push(p, s, t, pt, f);
    const ContactPoint cp = locate_contact(r.estimate, o, s.pose(2));
    EXPECT_LT((cp.point - pt).norm(), 1e-6);
    EXPECT_LT(std::abs(std::remainder(
                  std::atan2(cp.direction.y(), cp.direction.x()) - a, 2 * kPi)),
              1e-6);
    EXPECT_NEAR(cp.magnitude, mag, 1e-6);
  }
}

TEST(Detector, ZeroStreamNeverFires) {
  EXPECT_FALSE(detect_collision(std::vector<double>(500, 0.0), 40, 0.8));
}

TEST(Detector, StepFiresWhenWindowMeanCrosses) {
  for (std::size_t w : {1u, 10u, 40u, 64u}) {
    std::vector<double> s(100, 0.0);
    for (std::size_t i = 20; i < s.size(); ++i) s[i] = 10.0;
    // Mean after k samples is 10 k / w; first k with 10 k / w > 0.8.
    std::size_t k = 1;
    while (!(10.0 * static_cast<double>(k) / static_cast<double>(w) > 0.8)) ++k;
    const auto on = detect_collision(s, w, 0.8);
    ASSERT_TRUE(on);
    EXPECT_EQ(*on, 20 + k - 1);
  }
}

TEST(Detector, ShortImpulseBelowMeanIgnored) {
  std::vector<double> s(200, 0.0);
  s[50] = s[51] = 10.0;  // mean 0.5 over 40 samples
  EXPECT_FALSE(detect_collision(s, 40, 0.8));
}

TEST(Detector, TimeInvariantAndMonotoneInThreshold) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 2);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> s(300);
    for (double& v : s) v = u(rng);
    std::vector<double> shifted(37, 0.0);
    shifted.insert(shifted.end(), s.begin(), s.end());
    const auto a = detect_collision(s, 40, 0.9);
    const auto b = detect_collision(shifted, 40, 0.9);
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) EXPECT_EQ(*a + 37, *b);
    auto prev = detect_collision(s, 40, 0.5);
    for (double th : {0.7, 0.9, 1.0, 1.1, 1.5}) {
      const auto cur = detect_collision(s, 40, th);
      if (cur) {
        ASSERT_TRUE(prev);
        EXPECT_LE(*prev, *cur);
      }
      prev = cur;
    }
  }
}

// Dense KKT for min |F|^2 subject to H F = b.
VecX kkt_min_norm(const MatX& h, const VecX& b) {
  const int n = static_cast<int>(h.cols()), m = static_cast<int>(h.rows());
  MatX k = MatX::Zero(n + m, n + m);
  k.topLeftCorner(n, n) = 2.0 * MatX::Identity(n, n);
  k.topRightCorner(n, m) = h.transpose();
  k.bottomLeftCorner(m, n) = h;
  VecX rhs = VecX::Zero(n + m);
  rhs.tail(m) = b;
  return k.fullPivLu().solve(rhs).head(n);
}

TEST(Multicontact, SingleContactDetermined) {
  const auto f = multicontact_estimate({{Vec2::Zero()}, Vec3(3, -4, 0), {}});
  EXPECT_LT((f[0] - Vec2(3, -4)).norm(), 1e-12);
}

TEST(Multicontact, SymmetricEqualForces) {
  const auto f = multicontact_estimate(
      {{Vec2(0, 0.3), Vec2(0, -0.3)}, Vec3(10, 0, 0), {}});
  EXPECT_LT((f[0] - Vec2(5, 0)).norm(), 1e-12);
  EXPECT_LT((f[1] - Vec2(5, 0)).norm(), 1e-12);
}

TEST(Multicontact, MatchesKktOracle) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + k % 4;
    std::vector<Vec2> loc;
    for (int i = 0; i < n; ++i) loc.emplace_back(0.3 * g(rng), 0.3 * g(rng));
    const Vec3 net(g(rng), g(rng), g(rng));
    const auto f = multicontact_estimate({loc, net, {}});
    const VecX want = kkt_min_norm(contact_map(loc), net);
    VecX got(2 * n);
    for (int i = 0; i < n; ++i) got.segment<2>(2 * i) = f[i];
    EXPECT_LT((got - want).norm(), 1e-9);
    EXPECT_LT((contact_map(loc) * got - net).norm(), 1e-9);
  }
}

TEST(Multicontact, CoincidentContactsRankDeficient) {
  const auto f = multicontact_estimate(
      {{Vec2(0.1, 0.1), Vec2(0.1, 0.1)}, Vec3(2, 0, -0.2), {}});
  EXPECT_LT((f[0] - f[1]).norm(), 1e-12);
  EXPECT_LT((f[0] + f[1] - Vec2(2, 0)).norm(), 1e-9);
}

TEST(Multicontact, PriorRecoversPerpendicularPulls) {
  const std::vector<Vec2> loc{Vec2(0.1, 0.25), Vec2(-0.15, -0.1)};
  const Vec2 f1(0.0, 10.0), f2(10.0, 0.0);
  const Vec3 net = contact_map(loc) *
                   (VecX(4) << f1, f2).finished();
  const auto plain = multicontact_estimate({loc, net, {}});
  EXPECT_GT((plain[0] - f1).norm(), 1.0);
  const auto prior = multicontact_estimate({loc, net, f1.normalized()});
  EXPECT_LT((prior[0] - f1).norm(), 0.05 * f1.norm());
  EXPECT_LT((prior[1] - f2).norm(), 0.05 * f2.norm());
}

TEST(Wall, DetectThreshold) {
  EXPECT_TRUE(wall_detect(Vec2(0, 0), Vec2(0.05, 0), 0.05));
  EXPECT_FALSE(wall_detect(Vec2(0, 0), Vec2(0.049, 0), 0.05));
}

TEST(Wall, ExactLineSlope) {
  std::vector<Vec2> pts;
  for (int i = 0; i < 10; ++i) pts.emplace_back(0.1 * i, 0.1 * i);
  EXPECT_NEAR(fit_wall(pts).slope, 1.0, 1e-12);
  EXPECT_THROW(fit_wall({Vec2(1, 1)}), InputError);
}

TEST(Wall, VerticalReportedAsAngle) {
  std::vector<Vec2> pts;
  for (int i = 0; i < 10; ++i) pts.emplace_back(0.4, 0.1 * i);
  const WallFit w = fit_wall(pts);
  EXPECT_TRUE(w.vertical);
  EXPECT_NEAR(w.angle, kPi / 2.0, 1e-12);
}

TEST(Wall, NoisyFitMatchesOls) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, 1e-3);
  std::vector<Vec2> pts;
  for (int i = 0; i < 100; ++i) {
    const double x = 0.01 * i;
    pts.emplace_back(x + g(rng), 0.5 * x + g(rng));
  }
  EXPECT_LT(std::abs(fit_wall(pts).slope - 0.5), 0.02);
}

TEST(Wall, EstimatorCollectsOnlyWhileActive) {
  WallEstimator est(0.02);
  est.update(Vec2(0, 0), Vec2(0.0, 0.0));
  est.update(Vec2(0, 0), Vec2(0.03, 0.03));
  est.update(Vec2(0, 0), Vec2(0.05, 0.05));
  EXPECT_EQ(est.points().size(), 2u);
  EXPECT_NEAR(est.fit()->slope, 1.0, 1e-12);
}

TEST(Commands, TableExamples) {
  const CommandSet set = CommandSet::table();
  using P = BodyPart;
  EXPECT_EQ(match_command({{P::kBody, {0, 0}, {5, 0}}}, set), "Collide");
  EXPECT_EQ(match_command({{P::kRightHand, {0, -0.3}, {5, 0}}}, set), "Push");
  EXPECT_EQ(match_command({{P::kRightHand, {0, -0.3}, {-5, 0}}}, set), "Pull");
  EXPECT_EQ(match_command({{P::kLeftHand, {0, -0.3}, {5, 0}},
                           {P::kRightHand, {0, 0.3}, {-5, 0}}},
                          set),
            "Rotate");
}

TEST(Commands, GateAndTrigger) {
  const CommandSet set = CommandSet::table();
  using P = BodyPart;
  EXPECT_FALSE(match_command({{P::kLeftHand, {0, -0.3}, {6, 0}}}, set));
  EXPECT_FALSE(match_command({{P::kBody, {0, 0}, {4, 0}}}, set));
  EXPECT_FALSE(match_command({}, set));
  EXPECT_TRUE(std::isinf(command_score({{P::kBody, {0, 0}, {5, 0}}},
                                       set.commands[1], 1, 1)));
}

TEST(Stiction, AttenuationUnderestimatesMagnitude) {
  BaseParams p;
  StictionModel sm;
  Engine rng(1);
  const BodyOutline o = BodyOutline::triangle();
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Vec3 fac = sm.sample(rng);
    EXPECT_GE(fac.minCoeff(), 0.55);
    EXPECT_LE(fac.maxCoeff(), 1.0);
    const Vec2 pt = o.boundary_point(0.1);
    const Vec3 w = boundary_push_wrench(pt, -9.5 * o.outward_normal_at(pt), 0.0);
    const Vec3 delta = base_jacobians(p, 0.0).Jcw.transpose().lu().solve(w);
    const Vec3 ts = sm.attenuate(Vec3::Zero(), -delta, fac);
    const Vec3 est = estimate_wrench(Vec3::Zero(), ts, 0.0, p);
    const double ratio = est.head<2>().norm() / 9.5;
    EXPECT_LE(ratio, 1.0 + 1e-12);
    worst = std::max(worst, 1.0 - ratio);
  }
  EXPECT_GT(worst, 0.2);
  EXPECT_LT(worst, 0.46);
}

}  // namespace
}  // namespace omnisafe
