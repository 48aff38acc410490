#pragma once

#include <optional>
#include <vector>

#include "omnisafe/base_model.hpp"

namespace omnisafe {

// Virtual mass-damper rendered after a collision. B_des is in N*s/m.
struct AdmittanceParams {
  double mass = 2.0;
  double damping = 1.6;
  bool yaw_hold = true;

  double time_constant() const { return mass / damping; }
  void validate() const;
};

double design_damping(double threshold_force, double escape_distance);

// x(t) = x0 + (F / B)(1 - exp(-B t / M)) per axis; theta held at theta0.
Vec3 escape_trajectory(const AdmittanceParams& a, const Vec2& force,
                       const Vec3& x0, double t);
Vec3 escape_velocity(const AdmittanceParams& a, const Vec2& force, double t);

struct WheelTrajectory {
  double dt = 0.0;
  std::vector<Vec3> qw;
  std::vector<Vec3> qw_dot;
};

// Wheel targets from a pose path sampled every dt. Velocities come from
// finite differences and wheel angles are integrated from qw0.
WheelTrajectory to_wheel_trajectory(const BaseParams& p,
                                    const std::vector<Vec3>& poses, double dt,
                                    const Vec3& qw0 = Vec3::Zero());

// Appends the wall row [a, -1, 0, ...] to a constraint Jacobian whose first
// two columns are the planar position.
MatX wall_constrained_jacobian(const MatX& jc, double slope);
// Same row expressed for a wall heading angle (handles vertical walls).
MatX wall_row(double angle, int cols);

// Component of a planar velocity tangent to the wall.
Vec2 wall_tangent(const Vec2& v, double slope);

enum class ReactionMode { kTracking, kEscape };

enum class EscapeLatch {
  kThreshold,  // |F| = detector threshold, direction from the estimate
  kRaw,        // estimate as measured at detection
};

enum class EscapeOrigin { kMeasured, kLastTarget };

struct ReactionConfig {
  AdmittanceParams admittance;
  EscapeLatch latch = EscapeLatch::kThreshold;
  EscapeOrigin origin = EscapeOrigin::kMeasured;
  double threshold = 0.8;
  double dwell_time_constants = 5.0;
  double remerge_time = 2.0;
  bool remerge = true;
  // Acceleration limit on the emitted target; <= 0 disables.
  double accel_max = 2.0;
  double tracker_bandwidth = 10.0;  // rad/s, limited target follower

  void validate() const;
};

struct ReactionOutput {
  Vec3 target = Vec3::Zero();
  Vec3 target_dot = Vec3::Zero();
  ReactionMode mode = ReactionMode::kTracking;
  bool entered_escape = false;
};

class ReactionController {
 public:
  explicit ReactionController(const ReactionConfig& cfg = {});

  // One control tick. `detected` is the detector's firing flag and
  // `force_estimate` the world-frame force estimate at this tick.
  ReactionOutput step(double t, double dt, const Vec3& planned,
                      const Vec3& planned_dot, bool detected,
                      const Vec2& force_estimate, const Vec3& measured);

  ReactionMode mode() const { return mode_; }
  const Vec3& onset_pose() const { return x0_; }
  const Vec2& latched_force() const { return force_; }
  double onset_time() const { return t0_; }
  void reset();

 private:
  ReactionConfig cfg_;
  ReactionMode mode_ = ReactionMode::kTracking;
  double t0_ = 0.0;
  Vec3 x0_ = Vec3::Zero();
  Vec2 force_ = Vec2::Zero();
  Vec3 last_target_ = Vec3::Zero();
  Vec3 emitted_ = Vec3::Zero();
  Vec3 emitted_dot_ = Vec3::Zero();
  Vec3 escape_end_ = Vec3::Zero();
  bool have_target_ = false;
  bool merging_ = false;
};

}  // namespace omnisafe
