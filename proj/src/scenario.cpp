#include "omnisafe/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "omnisafe/roadmap.hpp"

namespace omnisafe {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const KeyValue& kv, const char* what) {
  throw ParseError(fmt::format("line {}: {} expects {}, got '{}'", kv.line, kv.key,
                               what, kv.value));
}

double to_double(const KeyValue& kv, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty()) {
    bad_value(kv, "a number");
  }
  return v;
}

double num(const KeyValue& kv) { return to_double(kv, kv.value); }

std::uint64_t u64(const KeyValue& kv) {
  const std::string t = trim(kv.value);
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty()) {
    bad_value(kv, "an unsigned integer");
  }
  return v;
}

int integer(const KeyValue& kv) {
  const std::string t = trim(kv.value);
  int v = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty()) {
    bad_value(kv, "an integer");
  }
  return v;
}

bool boolean(const KeyValue& kv) {
  if (kv.value == "true" || kv.value == "yes" || kv.value == "1") return true;
  if (kv.value == "false" || kv.value == "no" || kv.value == "0") return false;
  bad_value(kv, "true or false");
}

VecX vec(const KeyValue& kv) {
  std::vector<double> xs;
  std::stringstream ss(kv.value);
  std::string item;
  while (std::getline(ss, item, ',')) xs.push_back(to_double(kv, item));
  if (xs.empty()) bad_value(kv, "a comma-separated list");
  return Eigen::Map<VecX>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

template <int N>
Eigen::Matrix<double, N, 1> fixed(const KeyValue& kv) {
  const VecX v = vec(kv);
  if (v.size() != N) bad_value(kv, N == 2 ? "2 components" : "3 components");
  return v;
}

double deg(const KeyValue& kv) { return num(kv) * kPi / 180.0; }

using Handler = std::function<void(Scenario&, const KeyValue&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {
      {"name", [](Scenario& s, const KeyValue& kv) { s.name = kv.value; }},
      {"sim.duration", [](Scenario& s, const KeyValue& kv) { s.duration = num(kv); }},
      {"sim.dt", [](Scenario& s, const KeyValue& kv) { s.dt = num(kv); }},
      {"sim.seed", [](Scenario& s, const KeyValue& kv) { s.seed = u64(kv); }},
      {"sim.log_every", [](Scenario& s, const KeyValue& kv) { s.log_every = integer(kv); }},
      {"base.enabled", [](Scenario& s, const KeyValue& kv) { s.base_enabled = boolean(kv); }},
      {"base.mass", [](Scenario& s, const KeyValue& kv) { s.base.mass = num(kv); }},
      {"base.body_inertia",
       [](Scenario& s, const KeyValue& kv) { s.base.body_inertia = num(kv); }},
      {"base.wheel_inertia",
       [](Scenario& s, const KeyValue& kv) { s.base.wheel_inertia = num(kv); }},
      {"base.roller_inertia",
       [](Scenario& s, const KeyValue& kv) { s.base.roller_inertia = num(kv); }},
      {"base.wheel_center_radius",
       [](Scenario& s, const KeyValue& kv) { s.base.wheel_center_radius = num(kv); }},
      {"base.wheel_radius",
       [](Scenario& s, const KeyValue& kv) { s.base.wheel_radius = num(kv); }},
      {"base.roller_radius",
       [](Scenario& s, const KeyValue& kv) { s.base.roller_radius = num(kv); }},
      {"base.pose", [](Scenario& s, const KeyValue& kv) { s.pose0 = fixed<3>(kv); }},
      {"base.velocity", [](Scenario& s, const KeyValue& kv) { s.velocity0 = fixed<3>(kv); }},
      {"slope.angle_deg",
       [](Scenario& s, const KeyValue& kv) {
         s.slope.angle = deg(kv);
         s.slope.inclined = true;
       }},
      {"slope.heading_deg", [](Scenario& s, const KeyValue& kv) { s.slope.heading = deg(kv); }},
      {"slope.gravity", [](Scenario& s, const KeyValue& kv) { s.slope.gravity = num(kv); }},
      {"slope.convention",
       [](Scenario& s, const KeyValue& kv) {
         if (kv.value == "as_written") s.slope.convention = GravityConvention::kAsPaper;
         else if (kv.value == "physical") s.slope.convention = GravityConvention::kPhysical;
         else bad_value(kv, "as_written or physical");
       }},
      {"friction.magnitude",
       [](Scenario& s, const KeyValue& kv) { s.friction.magnitude = num(kv); }},
      {"friction.scaling", [](Scenario& s, const KeyValue& kv) { s.friction.scaling = num(kv); }},
      {"estimator.friction_magnitude",
       [](Scenario& s, const KeyValue& kv) { s.estimator_friction.magnitude = num(kv); }},
      {"estimator.friction_scaling",
       [](Scenario& s, const KeyValue& kv) { s.estimator_friction.scaling = num(kv); }},
      {"control.mode",
       [](Scenario& s, const KeyValue& kv) {
         if (kv.value == "none") s.control.mode = ControlMode::kNone;
         else if (kv.value == "osc") s.control.mode = ControlMode::kOsc;
         else bad_value(kv, "none or osc");
       }},
      {"control.kp", [](Scenario& s, const KeyValue& kv) { s.control.kp = num(kv); }},
      {"control.kd", [](Scenario& s, const KeyValue& kv) { s.control.kd = num(kv); }},
      {"control.kp_yaw", [](Scenario& s, const KeyValue& kv) { s.control.kp_yaw = num(kv); }},
      {"control.kd_yaw", [](Scenario& s, const KeyValue& kv) { s.control.kd_yaw = num(kv); }},
      {"plan.kind",
       [](Scenario& s, const KeyValue& kv) {
         if (kv.value == "hold") s.plan.kind = PlanKind::kHold;
         else if (kv.value == "line") s.plan.kind = PlanKind::kLine;
         else if (kv.value == "circle") s.plan.kind = PlanKind::kCircle;
         else bad_value(kv, "hold, line or circle");
       }},
      {"plan.velocity", [](Scenario& s, const KeyValue& kv) { s.plan.velocity = fixed<2>(kv); }},
      {"plan.center", [](Scenario& s, const KeyValue& kv) { s.plan.center = fixed<2>(kv); }},
      {"plan.radius", [](Scenario& s, const KeyValue& kv) { s.plan.radius = num(kv); }},
      {"plan.speed", [](Scenario& s, const KeyValue& kv) { s.plan.speed = num(kv); }},
      {"detector.window",
       [](Scenario& s, const KeyValue& kv) {
         const int w = integer(kv);
         if (w < 1) throw InputError("detector.window must be >= 1");
         s.detector_window = static_cast<std::size_t>(w);
       }},
      {"detector.threshold",
       [](Scenario& s, const KeyValue& kv) {
         s.detector_threshold = num(kv);
         s.reaction.threshold = s.detector_threshold;
       }},
      {"reaction.enabled",
       [](Scenario& s, const KeyValue& kv) { s.reaction_enabled = boolean(kv); }},
      {"reaction.mass",
       [](Scenario& s, const KeyValue& kv) { s.reaction.admittance.mass = num(kv); }},
      {"reaction.damping",
       [](Scenario& s, const KeyValue& kv) { s.reaction.admittance.damping = num(kv); }},
      {"reaction.yaw_hold",
       [](Scenario& s, const KeyValue& kv) { s.reaction.admittance.yaw_hold = boolean(kv); }},
      {"reaction.latch",
       [](Scenario& s, const KeyValue& kv) {
         if (kv.value == "threshold") s.reaction.latch = EscapeLatch::kThreshold;
         else if (kv.value == "raw") s.reaction.latch = EscapeLatch::kRaw;
         else bad_value(kv, "threshold or raw");
       }},
      {"reaction.remerge", [](Scenario& s, const KeyValue& kv) { s.reaction.remerge = boolean(kv); }},
      {"reaction.dwell",
       [](Scenario& s, const KeyValue& kv) { s.reaction.dwell_time_constants = num(kv); }},
      {"reaction.remerge_time",
       [](Scenario& s, const KeyValue& kv) { s.reaction.remerge_time = num(kv); }},
      {"reaction.accel_max", [](Scenario& s, const KeyValue& kv) { s.reaction.accel_max = num(kv); }},
      {"reaction.bandwidth",
       [](Scenario& s, const KeyValue& kv) { s.reaction.tracker_bandwidth = num(kv); }},
      {"outline.side",
       [](Scenario& s, const KeyValue& kv) { s.outline = BodyOutline::triangle(num(kv)); }},
      {"sensing.torque_noise", [](Scenario& s, const KeyValue& kv) { s.torque_noise = num(kv); }},
      {"commands.enabled",
       [](Scenario& s, const KeyValue& kv) { s.commands_enabled = boolean(kv); }},
      {"wall.enabled", [](Scenario& s, const KeyValue& kv) { s.wall.enabled = boolean(kv); }},
      {"wall.angle_deg", [](Scenario& s, const KeyValue& kv) { s.wall.angle = deg(kv); }},
      {"wall.slope",
       [](Scenario& s, const KeyValue& kv) { s.wall.angle = std::atan(num(kv)); }},
      {"wall.point", [](Scenario& s, const KeyValue& kv) { s.wall.point = fixed<2>(kv); }},
      {"wall.noise", [](Scenario& s, const KeyValue& kv) { s.wall.noise = num(kv); }},
      {"wall.err_threshold",
       [](Scenario& s, const KeyValue& kv) { s.wall.err_threshold = num(kv); }},
      {"wall.preload", [](Scenario& s, const KeyValue& kv) { s.wall.preload = num(kv); }},
      {"wall.min_fit_points",
       [](Scenario& s, const KeyValue& kv) { s.wall.min_fit_points = integer(kv); }},
      {"prediction.enabled",
       [](Scenario& s, const KeyValue& kv) { s.prediction.enabled = boolean(kv); }},
      {"prediction.eta",
       [](Scenario& s, const KeyValue& kv) {
         s.prediction.config.eta = num(kv);
         s.prediction.fsm.eta = s.prediction.config.eta;
       }},
      {"prediction.t_threshold",
       [](Scenario& s, const KeyValue& kv) { s.prediction.config.t_threshold = num(kv); }},
      {"prediction.horizon",
       [](Scenario& s, const KeyValue& kv) { s.prediction.config.horizon_time = num(kv); }},
      {"prediction.dt", [](Scenario& s, const KeyValue& kv) { s.prediction.config.dt = num(kv); }},
      {"prediction.caution_dwell",
       [](Scenario& s, const KeyValue& kv) { s.prediction.fsm.caution_dwell = num(kv); }},
      {"prediction.velocity_var",
       [](Scenario& s, const KeyValue& kv) { s.prediction.velocity_var = num(kv); }},
      {"planner.enabled", [](Scenario& s, const KeyValue& kv) { s.planner.enabled = boolean(kv); }},
      {"planner.chain", [](Scenario& s, const KeyValue& kv) { s.planner.chain = kv.value; }},
      {"planner.budget", [](Scenario& s, const KeyValue& kv) { s.planner.budget = integer(kv); }},
      {"planner.roadmap", [](Scenario& s, const KeyValue& kv) { s.planner.roadmap = kv.value; }},
      {"planner.constrained_roadmap",
       [](Scenario& s, const KeyValue& kv) { s.planner.constrained_roadmap = kv.value; }},
      {"planner.joint_speed",
       [](Scenario& s, const KeyValue& kv) { s.planner.joint_speed = num(kv); }},
      {"planner.connect_candidates",
       [](Scenario& s, const KeyValue& kv) { s.planner.connect_candidates = integer(kv); }},
      {"planner.goal_tolerance",
       [](Scenario& s, const KeyValue& kv) { s.planner.goal_tolerance = num(kv); }},
  };
  return h;
}

// "event.<id>.<field>" and "object.<id>.<field>" entries grouped by id, in
// first-appearance order.
struct Group {
  std::string id;
  std::map<std::string, KeyValue> fields;
};

Group* group_for(std::vector<Group>& groups, const std::string& id) {
  for (Group& g : groups) {
    if (g.id == id) return &g;
  }
  groups.push_back({id, {}});
  return &groups.back();
}

const KeyValue* field(const Group& g, const std::string& name) {
  const auto it = g.fields.find(name);
  return it == g.fields.end() ? nullptr : &it->second;
}

void check_fields(const Group& g, const std::string& kind,
                  const std::set<std::string>& allowed) {
  for (const auto& [name, kv] : g.fields) {
    if (!allowed.count(name)) {
      throw InputError(fmt::format("line {}: unknown field '{}' for {} '{}'", kv.line,
                                   name, kind, g.id));
    }
  }
}

void build_event(Scenario& s, const Group& g) {
  const KeyValue* type = field(g, "type");
  if (!type) throw InputError(fmt::format("event '{}' has no type", g.id));
  auto get = [&](const char* name, double& out) {
    if (const KeyValue* kv = field(g, name)) out = num(*kv);
  };
  auto get2 = [&](const char* name, Vec2& out) {
    if (const KeyValue* kv = field(g, name)) out = fixed<2>(*kv);
  };
  if (type->value == "push") {
    check_fields(g, "push", {"type", "t0", "duration", "point", "force"});
    PushEvent e;
    get("t0", e.t0);
    get("duration", e.duration);
    get2("point", e.point);
    get2("force", e.force);
    s.pushes.push_back(e);
  } else if (type->value == "impact") {
    check_fields(g, "impact",
                 {"type", "t0", "point", "direction", "mass", "speed", "drive",
                  "drive_duration", "bumper", "delay", "stiffness", "damping"});
    ImpactEvent e;
    if (const KeyValue* kv = field(g, "bumper")) e.bumper = BumperPreset::named(kv->value);
    get("t0", e.t0);
    get2("point", e.point);
    get2("direction", e.direction);
    get("mass", e.mass);
    get("speed", e.speed);
    get("drive", e.drive);
    get("drive_duration", e.drive_duration);
    get("delay", e.bumper.delay);
    get("stiffness", e.bumper.stiffness);
    get("damping", e.bumper.damping);
    s.impacts.push_back(e);
  } else if (type->value == "torque_fault") {
    check_fields(g, "torque_fault", {"type", "t0", "duration", "wheel", "offset"});
    TorqueFault e;
    get("t0", e.t0);
    get("duration", e.duration);
    if (const KeyValue* kv = field(g, "wheel")) e.wheel = integer(*kv);
    get("offset", e.offset);
    s.faults.push_back(e);
  } else {
    bad_value(*type, "push, impact or torque_fault");
  }
}

void build_object(Scenario& s, const Group& g) {
  check_fields(g, "object", {"position", "velocity", "radius", "noise", "sigma_d", "sigma_a",
                             "sigma_s"});
  ObjectSpec o;
  o.name = g.id;
  const KeyValue* pos = field(g, "position");
  if (!pos) throw InputError(fmt::format("object '{}' has no position", g.id));
  o.position = vec(*pos);
  const int d = static_cast<int>(o.position.size());
  o.velocity = VecX::Zero(d);
  if (const KeyValue* kv = field(g, "velocity")) o.velocity = vec(*kv);
  if (const KeyValue* kv = field(g, "radius")) o.radius = num(*kv);
  if (d < 1 || d > 3) throw InputError(fmt::format("object '{}': dimension must be 1..3", g.id));
  std::string model = "table";
  if (const KeyValue* kv = field(g, "noise")) model = kv->value;
  if (model == "table") {
    o.noise = NoiseParams::table(d);
  } else if (model == "noiseless" || model == "custom") {
    o.noise = NoiseParams::noiseless(d);
  } else {
    bad_value(*field(g, "noise"), "table, noiseless or custom");
  }
  auto sigma = [&](const char* name, VecX& out) {
    if (const KeyValue* kv = field(g, name)) {
      if (model != "custom") {
        throw InputError(fmt::format("line {}: {} requires noise = custom", kv->line, kv->key));
      }
      out = VecX::Constant(d, num(*kv));
    }
  };
  sigma("sigma_d", o.noise.sigma_d);
  sigma("sigma_a", o.noise.sigma_a);
  sigma("sigma_s", o.noise.sigma_s);
  s.objects.push_back(std::move(o));
}

}  // namespace

BumperPreset BumperPreset::named(const std::string& name) {
  // Engagement delays follow the measured detection times of the bumper
  // designs; contact stiffness is that of the engaged bumper.
  if (name == "pu") return {name, 0.045, 2.0e4, 200.0};
  if (name == "spring") return {name, 0.095, 2.0e3, 50.0};
  if (name == "magnet") return {name, 0.085, 5.0e3, 100.0};
  if (name == "rigid") return {name, 0.0, 2.0e4, 200.0};
  throw InputError("unknown bumper preset '" + name + "' (pu, spring, magnet, rigid)");
}

std::vector<KeyValue> parse_key_values(std::istream& is, const std::string& source) {
  std::vector<KeyValue> out;
  std::set<std::string> seen;
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ParseError(fmt::format("{}:{}: expected 'key = value'", source, line));
    }
    KeyValue kv{trim(text.substr(0, eq)), trim(text.substr(eq + 1)), line};
    if (kv.key.empty() || kv.key.find_first_of(" \t") != std::string::npos) {
      throw ParseError(fmt::format("{}:{}: malformed key '{}'", source, line, kv.key));
    }
    if (kv.value.empty()) {
      throw ParseError(fmt::format("{}:{}: empty value for '{}'", source, line, kv.key));
    }
    if (!seen.insert(kv.key).second) {
      throw ParseError(fmt::format("{}:{}: duplicate key '{}'", source, line, kv.key));
    }
    out.push_back(std::move(kv));
  }
  return out;
}

Scenario parse_scenario(std::istream& is, const std::string& source) {
  Scenario s;
  std::vector<Group> events, objects;
  bool friction_model_set = false;
  bool prediction_set = false;
  for (const KeyValue& kv : parse_key_values(is, source)) {
    const auto dot1 = kv.key.find('.');
    const std::string section = kv.key.substr(0, dot1);
    if (section == "event" || section == "object") {
      const auto dot2 = kv.key.find('.', dot1 + 1);
      if (dot1 == std::string::npos || dot2 == std::string::npos) {
        throw ParseError(fmt::format("{}:{}: expected {}.<id>.<field>", source, kv.line, section));
      }
      const std::string id = kv.key.substr(dot1 + 1, dot2 - dot1 - 1);
      Group* g = group_for(section == "event" ? events : objects, id);
      g->fields[kv.key.substr(dot2 + 1)] = kv;
      continue;
    }
    const auto it = handlers().find(kv.key);
    if (it == handlers().end()) {
      throw InputError(fmt::format("{}:{}: unknown key '{}'", source, kv.line, kv.key));
    }
    if (section == "estimator") friction_model_set = true;
    if (kv.key == "prediction.enabled") prediction_set = true;
    it->second(s, kv);
  }
  if (!friction_model_set) s.estimator_friction = s.friction;
  for (const Group& g : events) build_event(s, g);
  for (const Group& g : objects) build_object(s, g);
  // Prediction runs whenever there is a pair unless switched off explicitly.
  if (!prediction_set) s.prediction.enabled = s.objects.size() >= 2;
  for (ObjectSpec& o : s.objects) o.noise.dt = s.prediction.config.dt;
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open scenario file '" + path + "'");
  return parse_scenario(f, path);
}

int Scenario::steps() const {
  return static_cast<int>(std::llround(duration / dt));
}

void Scenario::validate() const {
  if (!(dt > 0) || !std::isfinite(dt)) throw InputError("sim.dt must be positive");
  if (!(duration >= 0) || !std::isfinite(duration)) {
    throw InputError("sim.duration must be >= 0");
  }
  if (duration / dt > 1e8) throw InputError("sim.duration / sim.dt exceeds 1e8 steps");
  if (log_every < 1) throw InputError("sim.log_every must be >= 1");
  base.validate();
  if (slope.inclined) slope.validate();
  friction.validate();
  estimator_friction.validate();
  const ControlSpec& c = control;
  if (!(c.kp >= 0 && c.kd >= 0 && c.kp_yaw >= 0 && c.kd_yaw >= 0)) {
    throw InputError("control gains must be >= 0");
  }
  if (plan.kind == PlanKind::kCircle && !(plan.radius > 0)) {
    throw InputError("plan.radius must be positive");
  }
  if (!(detector_threshold > 0)) throw InputError("detector.threshold must be positive");
  reaction.validate();
  outline.validate();
  if (!(torque_noise >= 0)) throw InputError("sensing.torque_noise must be >= 0");
  for (const PushEvent& e : pushes) {
    if (!(e.duration >= 0 && e.t0 >= 0)) throw InputError("push: t0 and duration must be >= 0");
  }
  for (const ImpactEvent& e : impacts) {
    if (!(e.mass > 0) || !(e.speed >= 0) || !(e.drive >= 0) || !(e.t0 >= 0) ||
        !(e.drive_duration >= 0)) {
      throw InputError("impact: mass must be positive; speed, drive, t0 >= 0");
    }
    if (!(e.direction.norm() > 0)) throw InputError("impact: direction must be nonzero");
    if (!(e.bumper.delay >= 0 && e.bumper.stiffness > 0 && e.bumper.damping >= 0)) {
      throw InputError("impact: bumper needs delay >= 0, stiffness > 0, damping >= 0");
    }
  }
  for (const TorqueFault& e : faults) {
    if (e.wheel < 0 || e.wheel > 2) throw InputError("torque_fault: wheel must be 0..2");
    if (!(e.duration >= 0 && e.t0 >= 0)) {
      throw InputError("torque_fault: t0 and duration must be >= 0");
    }
  }
  if (wall.enabled) {
    if (!(wall.noise >= 0 && wall.err_threshold > 0 && wall.preload >= 0)) {
      throw InputError("wall: noise and preload must be >= 0, err_threshold > 0");
    }
    const Vec2 n(-std::sin(wall.angle), std::cos(wall.angle));
    if (std::abs(n.dot(pose0.head<2>() - wall.point)) < 1e-9) {
      throw InputError("wall: initial position lies on the wall");
    }
    if (wall.min_fit_points < 2) throw InputError("wall.min_fit_points must be >= 2");
  }
  int dim = -1;
  for (const ObjectSpec& o : objects) {
    if (dim < 0) dim = static_cast<int>(o.position.size());
    if (o.position.size() != dim || o.velocity.size() != dim) {
      throw InputError("object '" + o.name + "': position/velocity dimensions differ");
    }
    if (!(o.radius > 0)) throw InputError("object '" + o.name + "': radius must be positive");
    o.noise.validate();
  }
  if (prediction.enabled) {
    if (objects.size() < 2) throw InputError("prediction needs at least two objects");
    prediction.config.validate();
    prediction.fsm.validate();
    const double ratio = prediction.config.dt / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-6 || std::round(ratio) < 1) {
      throw InputError("prediction.dt must be a positive multiple of sim.dt");
    }
    if (!(prediction.velocity_var > 0)) throw InputError("prediction.velocity_var must be > 0");
  }
  if (planner.enabled) {
    if (planner.chain != "humanoid_arm" && planner.chain != "planar_two_link") {
      throw InputError("planner.chain must be humanoid_arm or planar_two_link");
    }
    if (planner.budget < 0) throw InputError("planner.budget must be >= 0");
    if (!(planner.joint_speed > 0)) throw InputError("planner.joint_speed must be positive");
    if (!prediction.enabled) throw InputError("planner requires prediction");
    if (dim != 3) throw InputError("planner requires 3-D objects");
  }
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return 2;
  if (dynamic_cast<const InputError*>(&e)) return 3;
  if (dynamic_cast<const NumericalError*>(&e)) return 4;
  if (dynamic_cast<const PlanError*>(&e)) return 4;
  return 1;
}

}  // namespace omnisafe
