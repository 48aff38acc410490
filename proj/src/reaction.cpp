#include "omnisafe/reaction.hpp"

#include <cmath>

namespace omnisafe {

void AdmittanceParams::validate() const {
  if (!(mass > 0) || !(damping > 0)) {
    throw InputError("admittance: M_des and B_des must be positive");
  }
}

double design_damping(double threshold_force, double escape_distance) {
  if (!(threshold_force > 0) || !(escape_distance > 0)) {
    throw InputError("design_damping: threshold and distance must be positive");
  }
  return threshold_force / escape_distance;
}

Vec3 escape_trajectory(const AdmittanceParams& a, const Vec2& force,
                       const Vec3& x0, double t) {
  if (!(t >= 0)) throw InputError("escape_trajectory: t must be >= 0");
  const double s = 1.0 - std::exp(-t / a.time_constant());
  Vec3 x = x0;
  x.head<2>() += force / a.damping * s;
  return x;
}

Vec3 escape_velocity(const AdmittanceParams& a, const Vec2& force, double t) {
  Vec3 v = Vec3::Zero();
  v.head<2>() = force / a.mass * std::exp(-t / a.time_constant());
  return v;
}

WheelTrajectory to_wheel_trajectory(const BaseParams& p,
                                    const std::vector<Vec3>& poses, double dt,
                                    const Vec3& qw0) {
  if (!(dt > 0)) throw InputError("to_wheel_trajectory: dt must be positive");
  WheelTrajectory out;
  out.dt = dt;
  const std::size_t n = poses.size();
  if (n == 0) return out;
  std::vector<Vec3> vel(n, Vec3::Zero());
  if (n >= 2) {
    vel[0] = (poses[1] - poses[0]) / dt;
    vel[n - 1] = (poses[n - 1] - poses[n - 2]) / dt;
    for (std::size_t k = 1; k + 1 < n; ++k) {
      vel[k] = (poses[k + 1] - poses[k - 1]) / (2.0 * dt);
    }
  }
  Vec3 q = qw0;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3 qd = base_jacobians(p, poses[k](2)).Jcw * vel[k];
    if (k > 0) q += 0.5 * dt * (qd + out.qw_dot.back());
    out.qw.push_back(q);
    out.qw_dot.push_back(qd);
  }
  return out;
}

MatX wall_constrained_jacobian(const MatX& jc, double slope) {
  if (jc.cols() < 2) throw InputError("wall Jacobian: need planar columns");
  MatX out(jc.rows() + 1, jc.cols());
  out.topRows(jc.rows()) = jc;
  out.row(jc.rows()).setZero();
  out(jc.rows(), 0) = slope;
  out(jc.rows(), 1) = -1.0;
  return out;
}

MatX wall_row(double angle, int cols) {
  MatX row = MatX::Zero(1, cols);
  row(0, 0) = std::sin(angle);
  row(0, 1) = -std::cos(angle);
  return row;
}

Vec2 wall_tangent(const Vec2& v, double slope) {
  const Vec2 n(slope, -1.0);
  return v - n * (n.dot(v) / n.squaredNorm());
}

void ReactionConfig::validate() const {
  admittance.validate();
  if (!(threshold > 0)) throw InputError("reaction: threshold must be positive");
  if (!(dwell_time_constants > 0) || !(remerge_time > 0)) {
    throw InputError("reaction: dwell and re-merge times must be positive");
  }
  if (!(tracker_bandwidth > 0)) {
    throw InputError("reaction: tracker bandwidth must be positive");
  }
}

ReactionController::ReactionController(const ReactionConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
}

void ReactionController::reset() {
  mode_ = ReactionMode::kTracking;
  have_target_ = false;
  merging_ = false;
  t0_ = 0.0;
  x0_.setZero();
  force_.setZero();
}

ReactionOutput ReactionController::step(double t, double dt,
                                        const Vec3& planned,
                                        const Vec3& planned_dot, bool detected,
                                        const Vec2& force_estimate,
                                        const Vec3& measured) {
  ReactionOutput out;
  if (mode_ == ReactionMode::kTracking) {
    if (!detected) {
      out.target = planned;
      out.target_dot = planned_dot;
      last_target_ = planned;
      have_target_ = true;
      return out;
    }
    mode_ = ReactionMode::kEscape;
    out.entered_escape = true;
    t0_ = t;
    x0_ = cfg_.origin == EscapeOrigin::kLastTarget && have_target_ ? last_target_
                                                                    : measured;
    const double mag = force_estimate.norm();
    if (cfg_.latch == EscapeLatch::kRaw || mag == 0.0) {
      force_ = force_estimate;
    } else {
      force_ = force_estimate * (cfg_.threshold / mag);
    }
    emitted_ = x0_;
    emitted_dot_.setZero();
    merging_ = false;
  }

  const AdmittanceParams& a = cfg_.admittance;
  const double tau = t - t0_;
  const double dwell = cfg_.dwell_time_constants * a.time_constant();
  const double esc_t = cfg_.remerge ? std::min(tau, dwell) : tau;

  const Vec3 xa = escape_trajectory(a, force_, x0_, esc_t);
  const Vec3 va = escape_velocity(a, force_, esc_t);
  if (cfg_.accel_max <= 0.0 || tau == 0.0) {
    if (tau > 0.0) {
      emitted_ = xa;
      emitted_dot_ = va;
    }
  } else if (!cfg_.remerge || tau <= dwell) {
    const double w = cfg_.tracker_bandwidth;
    Vec2 acc = w * w * (xa - emitted_).head<2>() +
               2.0 * w * (va - emitted_dot_).head<2>() -
               va.head<2>() / a.time_constant();
    if (acc.norm() > cfg_.accel_max) acc *= cfg_.accel_max / acc.norm();
    emitted_dot_.head<2>() += dt * acc;
    emitted_.head<2>() += dt * emitted_dot_.head<2>();
  }
  emitted_(2) = x0_(2);
  emitted_dot_(2) = 0.0;
  if (!a.yaw_hold) {
    emitted_(2) = planned(2);
    emitted_dot_(2) = planned_dot(2);
  }

  out.mode = ReactionMode::kEscape;
  out.target = emitted_;
  out.target_dot = emitted_dot_;
  if (cfg_.remerge && tau >= dwell) {
    if (!merging_) {
      merging_ = true;
      escape_end_ = emitted_;
    }
    const double s = std::min((tau - dwell) / cfg_.remerge_time, 1.0);
    out.target = (1.0 - s) * escape_end_ + s * planned;
    out.target_dot = (planned - escape_end_) / cfg_.remerge_time +
                     s * planned_dot;
    if (s >= 1.0) {
      mode_ = ReactionMode::kTracking;
      out.mode = ReactionMode::kTracking;
      out.target = planned;
      out.target_dot = planned_dot;
    }
  }
  last_target_ = out.target;
  have_target_ = true;
  return out;
}

}  // namespace omnisafe
