#pragma once

#include <array>
#include <optional>

#include "omnisafe/linalg.hpp"

namespace omnisafe {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Mat69 = Eigen::Matrix<double, 6, 9>;
using Mat39 = Eigen::Matrix<double, 3, 9>;

// Three-omniwheel base. Generalized coordinates are ordered
// (x, y, theta, q_w0..2, q_r0..2).
struct BaseParams {
  double mass = 40.0;
  double body_inertia = 1.5;
  double wheel_inertia = 0.02;
  double roller_inertia = 1e-4;
  double wheel_center_radius = 0.2;  // R
  double wheel_radius = 0.05;        // r_w
  double roller_radius = 0.05;       // r_r
  std::array<double, 3> wheel_angles{0.0, 2.0 * kPi / 3.0, 4.0 * kPi / 3.0};

  void validate() const;
};

enum class GravityConvention {
  kAsPaper,   // m g cos(phi)
  kPhysical,  // m g sin(phi)
};

// Without an incline the slope term is zero. With one, G follows the chosen
// convention; note the as-written form is nonzero even at phi = 0.
struct SlopeSpec {
  bool inclined = false;
  double angle = 0.0;    // phi
  double heading = 0.0;  // psi
  double gravity = 9.81;
  GravityConvention convention = GravityConvention::kAsPaper;

  static SlopeSpec incline(double angle, double heading = 0.0,
                           GravityConvention c = GravityConvention::kAsPaper);
  void validate() const;
};

struct RollerFrictionParams {
  double magnitude = 0.2;  // B_r
  double scaling = 0.4;    // alpha

  void validate() const;
};

struct BaseState {
  Vec3 pose = Vec3::Zero();  // x, y, theta
  Vec3 qw = Vec3::Zero();
  Vec3 qr = Vec3::Zero();
  Vec3 pose_dot = Vec3::Zero();
  Vec3 qw_dot = Vec3::Zero();
  Vec3 qr_dot = Vec3::Zero();

  Vec9 q() const;
  Vec9 qdot() const;
  void set_q(const Vec9& q);
  void set_qdot(const Vec9& qd);
};

struct BaseJacobians {
  Mat3 Jcw = Mat3::Zero();
  Mat3 Jcr = Mat3::Zero();
  Mat69 Jc = Mat69::Zero();
};

BaseJacobians base_jacobians(const BaseParams& p, double theta);
// Time derivatives of the Jacobians along theta_dot.
BaseJacobians base_jacobians_dot(const BaseParams& p, double theta,
                                 double theta_dot);

Mat9 mass_matrix(const BaseParams& p);
Mat39 actuation_selector();
Vec9 gravity_vector(const BaseParams& p, const SlopeSpec& slope);
Vec3 roller_friction(const RollerFrictionParams& f, const Vec3& qr_dot);
// Full 9-vector B with wheel friction identically zero.
Vec9 friction_vector(const RollerFrictionParams& f, const Vec3& qr_dot);

// Planar wrench (F_x, F_y, tau) applied at a world-frame point.
struct ExternalWrench {
  Vec2 force = Vec2::Zero();
  double moment = 0.0;
  Vec2 point = Vec2::Zero();
};

// J_ext,b mapping (F_x, F_y, tau) to generalized body forces.
Mat3 ext_jacobian(const Vec3& pose, const Vec2& point);

struct DynamicsSolution {
  Vec9 qdd = Vec9::Zero();
  Vec3 lambda_w = Vec3::Zero();
  Vec3 lambda_r = Vec3::Zero();
};

// Solves A qdd + B + G + Jc^T lambda = U^T T + J_ext^T F with
// Jc qdd = -Jc_dot qdot. The external wrench acts on the robot.
DynamicsSolution forward_dynamics(const BaseParams& p,
                                  const RollerFrictionParams& friction,
                                  const SlopeSpec& slope, const BaseState& s,
                                  const Vec3& wheel_torques,
                                  const std::optional<ExternalWrench>& ext = {});

// Same solve with extra constraint rows appended to Jc (e.g. a wall).
// extra_rows have constant coefficients, so they add no Jc_dot term.
DynamicsSolution forward_dynamics_constrained(
    const BaseParams& p, const RollerFrictionParams& friction,
    const SlopeSpec& slope, const BaseState& s, const Vec3& wheel_torques,
    const std::optional<ExternalWrench>& ext, const MatX& extra_rows,
    VecX* extra_lambda = nullptr);

struct BodyAccel {
  Vec3 xdd = Vec3::Zero();
  Vec3 qr_dd = Vec3::Zero();
};

BodyAccel body_accel_from_wheels(const BaseParams& p, double theta,
                                 double theta_dot, const Vec3& qw_dot,
                                 const Vec3& qw_dd);

// Body velocity implied by wheel rates, and roller rates implied by body rates.
Vec3 body_velocity_from_wheels(const BaseParams& p, double theta,
                               const Vec3& qw_dot);
BaseState consistent_state(const BaseParams& p, const Vec3& pose,
                           const Vec3& pose_dot);

double rolling_residual(const BaseParams& p, const BaseState& s);
double kinetic_energy(const BaseParams& p, const BaseState& s);

// Semi-implicit Euler; velocities are re-projected onto the rolling
// constraints (mass-weighted) after each step.
void integrate_semi_implicit(const BaseParams& p, BaseState& s,
                             const Vec9& qdd, double dt,
                             bool project_velocity = true,
                             const MatX& extra_rows = MatX());

}  // namespace omnisafe
