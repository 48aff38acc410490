#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "omnisafe/base_model.hpp"
#include "omnisafe/rng.hpp"

namespace omnisafe {

// Generalized external wrench (F_x, F_y, moment about the base center), world
// frame, as produced by estimate_wrench.
struct WrenchEstimate {
  Vec3 wrench = Vec3::Zero();
  double timestamp = 0.0;

  Vec2 force() const { return wrench.head<2>(); }
  double moment() const { return wrench(2); }
};

// Convex, counterclockwise polygon in the body frame.
struct BodyOutline {
  std::vector<Vec2> vertices;

  // Equilateral triangle with the given side; vertices point along the
  // wheel axes at 0, 120 and 240 degrees.
  static BodyOutline triangle(double side = 0.61);
  void validate() const;
  // Point on the boundary at arc-length fraction s in [0, 1).
  Vec2 boundary_point(double s) const;
  // Outward unit normal of the edge containing boundary point p.
  Vec2 outward_normal_at(const Vec2& p) const;
  Vec2 nearest_boundary_point(const Vec2& p) const;
  double perimeter() const;
};

struct ContactPoint {
  Vec2 point = Vec2::Zero();      // body frame
  Vec2 direction = Vec2::UnitX();  // body frame unit vector
  double magnitude = 0.0;
  bool snapped_to_vertex = false;
  bool on_miss_projected = false;
};

class NoContactPoint : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Torque each wheel would read with no external force, given accelerations
// consistent with the state.
Vec3 nominal_torque(const BaseParams& p, const RollerFrictionParams& friction,
                    const BaseState& s, const Vec3& xdd, const Vec3& qw_dd,
                    const Vec3& qr_dd, const SlopeSpec& slope = {});

// J_cw^T (T_nominal - T_sensed): equals J_ext^T F_ext for a true push.
Vec3 estimate_wrench(const Vec3& t_nominal, const Vec3& t_sensed, double theta,
                     const BaseParams& p);

// Third component of estimate_wrench written without J_cw. The wheel-inertia
// term vanishes when I_w = 0.
double row3_moment(const BaseParams& p, double theta_dd, const Vec3& qw_dd,
                   const Vec3& t_sensed);

enum class MissPolicy { kError, kNearest };

struct LocateOptions {
  double force_floor = 1e-9;
  double vertex_snap = 1e-9;
  MissPolicy on_miss = MissPolicy::kError;
};

// Pushing-side intersection of the zero-moment line with the outline.
// theta rotates the world-frame wrench into the body frame.
ContactPoint locate_contact(const Vec3& wrench, const BodyOutline& outline,
                            double theta = 0.0, const LocateOptions& opt = {});

// Wrench that a push at a body-frame boundary point generates, world frame.
Vec3 boundary_push_wrench(const Vec2& point_body, const Vec2& force_body,
                          double theta);

// Moving average of |F| over a window; samples before the first push count
// as zero so the detector is time-invariant.
class CollisionDetector {
 public:
  CollisionDetector(std::size_t window = 40, double threshold = 0.8);

  // Returns true on the sample where the window mean first exceeds the
  // threshold; stays latched afterwards.
  bool push(double force_magnitude);
  double mean() const { return sum_ / static_cast<double>(window_); }
  bool fired() const { return fired_; }
  std::optional<std::size_t> onset() const { return onset_; }
  void reset();

 private:
  std::size_t window_;
  double threshold_;
  std::deque<double> buf_;
  double sum_ = 0.0;
  std::size_t count_ = 0;
  bool fired_ = false;
  std::optional<std::size_t> onset_;
};

std::optional<std::size_t> detect_collision(const std::vector<double>& stream,
                                            std::size_t window,
                                            double threshold);

struct MulticontactProblem {
  std::vector<Vec2> locations;
  Vec3 net = Vec3::Zero();
  std::optional<Vec2> first_direction;
};

MatX contact_map(const std::vector<Vec2>& locations);
std::vector<Vec2> multicontact_estimate(const MulticontactProblem& problem);

// Discrepancy between planned and measured position.
bool wall_detect(const Vec2& planned, const Vec2& measured, double err_threshold);

struct WallFit {
  double slope = 0.0;   // a_n; infinite for a vertical wall
  double angle = 0.0;   // wall heading in (-pi/2, pi/2]
  bool vertical = false;
  std::size_t points = 0;
};

// Ordinary least squares on raw points. When the x spread vanishes the
// heading comes from the principal axis instead.
WallFit fit_wall(const std::vector<Vec2>& points);

// Accumulates points while the tracking error exceeds the threshold.
class WallEstimator {
 public:
  explicit WallEstimator(double err_threshold) : err_threshold_(err_threshold) {}
  bool update(const Vec2& planned, const Vec2& measured);
  bool active() const { return active_; }
  std::optional<WallFit> fit() const;
  const std::vector<Vec2>& points() const { return points_; }

 private:
  double err_threshold_;
  bool active_ = false;
  std::vector<Vec2> points_;
};

enum class BodyPart { kLeftHand, kRightHand, kBody };

BodyPart parse_body_part(const std::string& s);
std::string to_string(BodyPart p);

struct Touch {
  BodyPart part = BodyPart::kBody;
  Vec2 location = Vec2::Zero();
  Vec2 force = Vec2::Zero();
};

struct Command {
  std::string name;
  std::vector<Touch> triggers;
};

struct CommandSet {
  std::vector<Command> commands;
  double w_l = 1.0;
  double w_f = 1.0;
  double trigger = 5.0;

  static CommandSet table();  // Collide, Push, Pull, Rotate
  void validate() const;
};

double command_score(const std::vector<Touch>& touches, const Command& c,
                     double w_l, double w_f);
std::optional<std::string> match_command(const std::vector<Touch>& touches,
                                         const CommandSet& set);

// Per-wheel multiplicative attenuation of the external-force torque.
struct StictionModel {
  double lo = 0.55;
  double hi = 1.0;

  Vec3 sample(Engine& rng) const;
  // Sensed torque when the true external contribution is scaled per wheel.
  Vec3 attenuate(const Vec3& t_nominal, const Vec3& t_sensed,
                 const Vec3& factors) const;
};

}  // namespace omnisafe
