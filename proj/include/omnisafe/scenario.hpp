#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "omnisafe/base_model.hpp"
#include "omnisafe/contact.hpp"
#include "omnisafe/fsm.hpp"
#include "omnisafe/prediction.hpp"
#include "omnisafe/reaction.hpp"

namespace omnisafe {

// Malformed scenario text (exit code 2). Semantic problems raise InputError
// (exit 3) and numerical failures NumericalError (exit 4).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

// "key = value" lines; '#' starts a comment; blank lines are ignored.
// Duplicate keys are a parse error.
std::vector<KeyValue> parse_key_values(std::istream& is,
                                       const std::string& source = "<input>");

enum class PlanKind { kHold, kLine, kCircle };
enum class ControlMode { kNone, kOsc };

struct PlanSpec {
  PlanKind kind = PlanKind::kHold;
  Vec2 velocity = Vec2::Zero();  // line
  Vec2 center = Vec2::Zero();    // circle
  double radius = 1.0;
  double speed = 0.2;  // m/s along the circle, counterclockwise
};

struct ControlSpec {
  ControlMode mode = ControlMode::kOsc;
  double kp = 100.0;  // 1/s^2, task-space
  double kd = 20.0;   // 1/s
  double kp_yaw = 100.0;
  double kd_yaw = 20.0;
};

struct PushEvent {
  double t0 = 0.0;
  double duration = 0.1;
  Vec2 point = Vec2::Zero();  // body frame
  Vec2 force = Vec2::Zero();  // body frame, N
};

// Bumper presets stand in for bumper mechanics: the engagement delay is the
// time between first touch and force transmission.
struct BumperPreset {
  std::string name;
  double delay = 0.0;
  double stiffness = 0.0;  // N/m
  double damping = 0.0;    // N*s/m

  static BumperPreset named(const std::string& name);
};

// Sliding dummy driven by a constant force that meets the robot at speed.
struct ImpactEvent {
  double t0 = 0.0;
  Vec2 point = Vec2::Zero();               // body frame contact point
  Vec2 direction = Vec2(-1.0, 0.0);        // body frame, into the robot
  double mass = 9.08;
  double speed = 0.5;
  double drive = 44.54;
  double drive_duration = 0.3;
  BumperPreset bumper = BumperPreset::named("pu");
};

// Additive bias on one wheel's torque sensor.
struct TorqueFault {
  double t0 = 0.0;
  double duration = 0.1;
  int wheel = 0;
  double offset = 0.0;
};

// Straight wall the base center cannot cross. The free side is the one that
// holds the initial position.
struct WallSpec {
  bool enabled = false;
  double angle = kPi / 4.0;  // heading of the wall line
  Vec2 point = Vec2::Zero();
  double noise = 0.0;          // measurement sigma, m
  double err_threshold = 0.02;  // m
  double preload = 0.005;       // m, target push into the fitted wall
  int min_fit_points = 50;
};

struct ObjectSpec {
  std::string name;
  VecX position;
  VecX velocity;
  double radius = 0.1;
  NoiseParams noise;
};

struct PredictionSpec {
  bool enabled = false;
  PredictionConfig config;
  FsmConfig fsm;
  double velocity_var = 1.0;  // prior on the first observation
};

struct PlannerSpec {
  bool enabled = false;
  std::string chain = "humanoid_arm";
  int budget = 1000;
  std::string roadmap;              // unconstrained file, optional
  std::string constrained_roadmap;  // optional
  double joint_speed = 1.0;          // rad/s for kinematic execution
  int connect_candidates = 10;
  double goal_tolerance = 0.01;
};

struct Scenario {
  std::string name = "unnamed";
  double duration = 1.0;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  int log_every = 10;

  bool base_enabled = true;
  BaseParams base;
  Vec3 pose0 = Vec3::Zero();
  Vec3 velocity0 = Vec3::Zero();
  SlopeSpec slope;
  RollerFrictionParams friction;
  RollerFrictionParams estimator_friction;  // model used for estimation
  ControlSpec control;
  PlanSpec plan;
  std::size_t detector_window = 40;
  double detector_threshold = 0.8;
  bool reaction_enabled = false;
  ReactionConfig reaction;
  BodyOutline outline = BodyOutline::triangle();
  double torque_noise = 0.0;  // sensor sigma, N*m
  bool commands_enabled = false;

  std::vector<PushEvent> pushes;
  std::vector<ImpactEvent> impacts;
  std::vector<TorqueFault> faults;
  WallSpec wall;

  std::vector<ObjectSpec> objects;
  PredictionSpec prediction;
  PlannerSpec planner;

  int steps() const;
  void validate() const;
};

Scenario parse_scenario(std::istream& is, const std::string& source = "<input>");
Scenario load_scenario(const std::string& path);

// Exit code for an exception escaping run_scenario or the loaders.
int exit_code_for(const std::exception& e);

}  // namespace omnisafe
