#include "omnisafe/base_model.hpp"

#include <cmath>
#include <string>

namespace omnisafe {

void BaseParams::validate() const {
  if (!(mass > 0 && body_inertia > 0 && wheel_inertia > 0 &&
        roller_inertia > 0)) {
    throw InputError("base: masses and inertias must be positive");
  }
  if (!(wheel_center_radius > 0 && wheel_radius > 0 && roller_radius > 0)) {
    throw InputError("base: radii must be positive");
  }
  for (int i = 0; i < 3; ++i) {
    if (std::abs(wheel_angles[i] - 2.0 * kPi * i / 3.0) > 1e-12) {
      throw InputError("base: wheel offsets must be {0, 2pi/3, 4pi/3}");
    }
  }
}

void SlopeSpec::validate() const {
  if (!(angle >= 0.0 && angle < kPi / 2.0)) {
    throw InputError("slope: angle must lie in [0, pi/2)");
  }
  if (!std::isfinite(heading) || !std::isfinite(gravity)) {
    throw InputError("slope: non-finite heading or gravity");
  }
}

SlopeSpec SlopeSpec::incline(double angle, double heading,
                             GravityConvention c) {
  SlopeSpec s;
  s.inclined = true;
  s.angle = angle;
  s.heading = heading;
  s.convention = c;
  return s;
}

void RollerFrictionParams::validate() const {
  if (!(magnitude >= 0.0) || !(scaling > 0.0)) {
    throw InputError("friction: need B_r >= 0 and alpha > 0");
  }
}

Vec9 BaseState::q() const {
  Vec9 out;
  out << pose, qw, qr;
  return out;
}

Vec9 BaseState::qdot() const {
  Vec9 out;
  out << pose_dot, qw_dot, qr_dot;
  return out;
}

void BaseState::set_q(const Vec9& q) {
  pose = q.segment<3>(0);
  qw = q.segment<3>(3);
  qr = q.segment<3>(6);
}

void BaseState::set_qdot(const Vec9& qd) {
  pose_dot = qd.segment<3>(0);
  qw_dot = qd.segment<3>(3);
  qr_dot = qd.segment<3>(6);
}

BaseJacobians base_jacobians(const BaseParams& p, double theta) {
  BaseJacobians j;
  for (int i = 0; i < 3; ++i) {
    const double a = theta + p.wheel_angles[i];
    j.Jcw.row(i) << -std::sin(a), std::cos(a), p.wheel_center_radius;
    j.Jcr.row(i) << std::cos(a), std::sin(a), 0.0;
  }
  j.Jcw /= p.wheel_radius;
  j.Jcr /= p.roller_radius;
  j.Jc.block<3, 3>(0, 0) = j.Jcw;
  j.Jc.block<3, 3>(0, 3) = -Mat3::Identity();
  j.Jc.block<3, 3>(3, 0) = j.Jcr;
  j.Jc.block<3, 3>(3, 6) = -Mat3::Identity();
  return j;
}

BaseJacobians base_jacobians_dot(const BaseParams& p, double theta,
                                 double theta_dot) {
  BaseJacobians j;
  for (int i = 0; i < 3; ++i) {
    const double a = theta + p.wheel_angles[i];
    j.Jcw.row(i) << -std::cos(a), -std::sin(a), 0.0;
    j.Jcr.row(i) << -std::sin(a), std::cos(a), 0.0;
  }
  j.Jcw *= theta_dot / p.wheel_radius;
  j.Jcr *= theta_dot / p.roller_radius;
  j.Jc.block<3, 3>(0, 0) = j.Jcw;
  j.Jc.block<3, 3>(3, 0) = j.Jcr;
  return j;
}

Mat9 mass_matrix(const BaseParams& p) {
  Vec9 d;
  d << p.mass, p.mass, p.body_inertia, Vec3::Constant(p.wheel_inertia),
      Vec3::Constant(p.roller_inertia);
  return d.asDiagonal();
}

Mat39 actuation_selector() {
  Mat39 u = Mat39::Zero();
  u.block<3, 3>(0, 3) = Mat3::Identity();
  return u;
}

Vec9 gravity_vector(const BaseParams& p, const SlopeSpec& slope) {
  if (!slope.inclined) return Vec9::Zero();
  const double c = slope.convention == GravityConvention::kAsPaper
                       ? std::cos(slope.angle)
                       : std::sin(slope.angle);
  const double mag = p.mass * slope.gravity * c;
  Vec9 g = Vec9::Zero();
  g(0) = mag * std::cos(slope.heading);
  g(1) = mag * std::sin(slope.heading);
  return g;
}

Vec3 roller_friction(const RollerFrictionParams& f, const Vec3& qr_dot) {
  return f.magnitude * (f.scaling * qr_dot).array().tanh().matrix();
}

Vec9 friction_vector(const RollerFrictionParams& f, const Vec3& qr_dot) {
  Vec9 b = Vec9::Zero();
  b.segment<3>(6) = roller_friction(f, qr_dot);
  return b;
}

Mat3 ext_jacobian(const Vec3& pose, const Vec2& point) {
  Mat3 j = Mat3::Identity();
  j(0, 2) = pose(1) - point(1);
  j(1, 2) = point(0) - pose(0);
  return j;
}

namespace {

DynamicsSolution solve_kkt(const BaseParams& p,
                           const RollerFrictionParams& friction,
                           const SlopeSpec& slope, const BaseState& s,
                           const Vec3& wheel_torques,
                           const std::optional<ExternalWrench>& ext,
                           const MatX& extra_rows, VecX* extra_lambda) {
  const int ke = static_cast<int>(extra_rows.rows());
  if (ke > 0 && extra_rows.cols() != 9) {
    throw InputError("forward_dynamics: extra constraint rows need 9 columns");
  }
  const int k = 6 + ke;
  const BaseJacobians j = base_jacobians(p, s.pose(2));
  const BaseJacobians jd = base_jacobians_dot(p, s.pose(2), s.pose_dot(2));
  const Vec9 qd = s.qdot();

  MatX jc(k, 9);
  jc.topRows<6>() = j.Jc;
  if (ke > 0) jc.bottomRows(ke) = extra_rows;

  Vec9 rhs = actuation_selector().transpose() * wheel_torques -
             friction_vector(friction, s.qr_dot) - gravity_vector(p, slope);
  if (ext) {
    const Vec3 f(ext->force(0), ext->force(1), ext->moment);
    rhs.head<3>() += ext_jacobian(s.pose, ext->point).transpose() * f;
  }

  MatX kkt = MatX::Zero(9 + k, 9 + k);
  kkt.topLeftCorner<9, 9>() = mass_matrix(p);
  kkt.topRightCorner(9, k) = jc.transpose();
  kkt.bottomLeftCorner(k, 9) = jc;
  VecX b(9 + k);
  b.head<9>() = rhs;
  b.segment<6>(9) = -jd.Jc * qd;
  if (ke > 0) b.tail(ke).setZero();

  Eigen::FullPivLU<MatX> lu(kkt);
  if (!lu.isInvertible()) {
    throw NumericalError("forward_dynamics: singular constrained mass");
  }
  const VecX sol = lu.solve(b);
  if (!sol.allFinite()) {
    throw NumericalError("forward_dynamics: non-finite solution");
  }
  DynamicsSolution out;
  out.qdd = sol.head<9>();
  out.lambda_w = sol.segment<3>(9);
  out.lambda_r = sol.segment<3>(12);
  if (extra_lambda) *extra_lambda = sol.tail(ke);
  return out;
}

}  // namespace

DynamicsSolution forward_dynamics(const BaseParams& p,
                                  const RollerFrictionParams& friction,
                                  const SlopeSpec& slope, const BaseState& s,
                                  const Vec3& wheel_torques,
                                  const std::optional<ExternalWrench>& ext) {
  return solve_kkt(p, friction, slope, s, wheel_torques, ext, MatX(), nullptr);
}

DynamicsSolution forward_dynamics_constrained(
    const BaseParams& p, const RollerFrictionParams& friction,
    const SlopeSpec& slope, const BaseState& s, const Vec3& wheel_torques,
    const std::optional<ExternalWrench>& ext, const MatX& extra_rows,
    VecX* extra_lambda) {
  return solve_kkt(p, friction, slope, s, wheel_torques, ext, extra_rows,
                   extra_lambda);
}

BodyAccel body_accel_from_wheels(const BaseParams& p, double theta,
                                 double theta_dot, const Vec3& qw_dot,
                                 const Vec3& qw_dd) {
  const BaseJacobians j = base_jacobians(p, theta);
  const BaseJacobians jd = base_jacobians_dot(p, theta, theta_dot);
  const Mat3 jinv = j.Jcw.inverse();
  const Mat3 jinv_dot = -jinv * jd.Jcw * jinv;
  BodyAccel out;
  out.xdd = jinv * qw_dd + jinv_dot * qw_dot;
  const Vec3 xd = jinv * qw_dot;
  out.qr_dd = j.Jcr * out.xdd + jd.Jcr * xd;
  return out;
}

Vec3 body_velocity_from_wheels(const BaseParams& p, double theta,
                               const Vec3& qw_dot) {
  return base_jacobians(p, theta).Jcw.inverse() * qw_dot;
}

BaseState consistent_state(const BaseParams& p, const Vec3& pose,
                           const Vec3& pose_dot) {
  const BaseJacobians j = base_jacobians(p, pose(2));
  BaseState s;
  s.pose = pose;
  s.pose_dot = pose_dot;
  s.qw_dot = j.Jcw * pose_dot;
  s.qr_dot = j.Jcr * pose_dot;
  return s;
}

double rolling_residual(const BaseParams& p, const BaseState& s) {
  return (base_jacobians(p, s.pose(2)).Jc * s.qdot()).cwiseAbs().maxCoeff();
}

double kinetic_energy(const BaseParams& p, const BaseState& s) {
  const Vec9 qd = s.qdot();
  return 0.5 * qd.dot(mass_matrix(p) * qd);
}

void integrate_semi_implicit(const BaseParams& p, BaseState& s,
                             const Vec9& qdd, double dt, bool project_velocity,
                             const MatX& extra_rows) {
  Vec9 qd = s.qdot() + dt * qdd;
  Vec9 q = s.q() + dt * qd;
  s.set_q(q);
  if (project_velocity) {
    const int ke = static_cast<int>(extra_rows.rows());
    MatX jc(6 + ke, 9);
    jc.topRows<6>() = base_jacobians(p, q(2)).Jc;
    if (ke > 0) jc.bottomRows(ke) = extra_rows;
    const Vec9 ainv = mass_matrix(p).diagonal().cwiseInverse();
    const MatX ajt = ainv.asDiagonal() * jc.transpose();
    const MatX lam = jc * ajt;
    qd -= ajt * lam.ldlt().solve(jc * qd);
  }
  s.set_qdot(qd);
}

}  // namespace omnisafe
