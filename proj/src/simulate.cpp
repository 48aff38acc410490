#include "omnisafe/simulate.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <fmt/format.h>

#include "omnisafe/rng.hpp"
#include "omnisafe/wbosc.hpp"

namespace omnisafe {

namespace {

Mat2 rot(double th) { return Eigen::Rotation2Dd(th).toRotationMatrix(); }

struct PlanSample {
  Vec3 x = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();
};

PlanSample plan_at(const Scenario& s, double t) {
  PlanSample p;
  p.x = s.pose0;
  switch (s.plan.kind) {
    case PlanKind::kHold:
      break;
    case PlanKind::kLine:
      p.x.head<2>() += t * s.plan.velocity;
      p.v.head<2>() = s.plan.velocity;
      break;
    case PlanKind::kCircle: {
      const Vec2 r0 = s.pose0.head<2>() - s.plan.center;
      const double phi0 = r0.norm() > 0 ? std::atan2(r0.y(), r0.x()) : 0.0;
      const double w = s.plan.speed / s.plan.radius;
      const double phi = phi0 + w * t;
      const double r = s.plan.radius;
      p.x.head<2>() = s.plan.center + r * Vec2(std::cos(phi), std::sin(phi));
      p.v.head<2>() = r * w * Vec2(-std::sin(phi), std::cos(phi));
      p.a.head<2>() = -r * w * w * Vec2(std::cos(phi), std::sin(phi));
      break;
    }
  }
  return p;
}

Vec3 pose_error(const Vec3& target, const Vec3& x) {
  Vec3 e = target - x;
  e(2) = std::remainder(e(2), 2.0 * kPi);
  return e;
}

MatX body_task() {
  MatX j = MatX::Zero(3, 9);
  j.leftCols(3) = MatX::Identity(3, 3);
  return j;
}

// Operational-space torques realizing a_ref under the robot's own model.
Vec3 osc_command(const Scenario& s, const BaseState& st, const Vec3& a_ref) {
  const double th = st.pose(2);
  const ConstrainedSystem sys{mass_matrix(s.base), base_jacobians(s.base, th).Jc,
                              actuation_selector()};
  const ConstraintOps c = constraint_operators(sys);
  const TaskSpec task{body_task(), a_ref};
  const TaskOps t = task_operators(sys, c, task);
  const Vec9 bias =
      gravity_vector(s.base, s.slope) + friction_vector(s.estimator_friction, st.qr_dot);
  const Vec6 jcd = base_jacobians_dot(s.base, th, st.pose_dot(2)).Jc * st.qdot();
  return osc_torque(sys, c, t, task, bias, jcd, VecX());
}

struct ImpactState {
  bool engaged = false;
  bool done = false;
  Vec2 direction = Vec2::Zero();  // world, fixed at engagement
  double s_dummy = 0.0;
  double v_dummy = 0.0;
};

// Contact point velocity in the world frame.
Vec2 point_velocity(const BaseState& st, const Vec2& offset_world) {
  return st.pose_dot.head<2>() + st.pose_dot(2) * Vec2(-offset_world.y(), offset_world.x());
}

struct Wrench {
  Vec2 force = Vec2::Zero();
  double moment = 0.0;  // about the base center

  void add(const Vec2& f, const Vec2& offset_world) {
    force += f;
    moment += offset_world.x() * f.y() - offset_world.y() * f.x();
  }
};

void check_finite(const BaseState& st, double t) {
  if (!st.q().allFinite() || !st.qdot().allFinite()) {
    throw NumericalError(fmt::format("simulation diverged at t = {}", t));
  }
}

std::string mode_name(ReactionMode m) {
  return m == ReactionMode::kTracking ? "tracking" : "escape";
}

Vec3 pad3(const VecX& v) {
  Vec3 out = Vec3::Zero();
  out.head(v.size()) = v;
  return out;
}

std::string joined(const VecX& q) {
  std::string out;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (i) out += ' ';
    out += fmt::format("{}", q(i));
  }
  return out;
}

std::vector<Value> state_values(const BaseState& st, const std::string& mode) {
  return {st.pose(0), st.pose(1), st.pose(2), st.pose_dot(0), st.pose_dot(1),
          st.pose_dot(2), mode};
}

std::vector<Value> dynamics_values(const BaseState& st, const Vec9& qdd) {
  std::vector<Value> v;
  for (int i = 0; i < 3; ++i) v.emplace_back(st.qw_dot(i));
  for (int i = 0; i < 3; ++i) v.emplace_back(st.qr_dot(i));
  for (int i = 0; i < 9; ++i) v.emplace_back(qdd(i));
  return v;
}

// Estimation shared by the live loop and offline re-estimation.
struct Estimator {
  const Scenario& s;
  CollisionDetector detector;
  LocateOptions locate;

  explicit Estimator(const Scenario& sc)
      : s(sc), detector(sc.detector_window, sc.detector_threshold) {
    locate.on_miss = MissPolicy::kNearest;
  }

  Vec3 wrench(const BaseState& st, const Vec9& qdd, const Vec3& sensed) const {
    const Vec3 tn = nominal_torque(s.base, s.estimator_friction, st, qdd.head<3>(),
                                   qdd.segment<3>(3), qdd.tail<3>(), s.slope);
    return estimate_wrench(tn, sensed, st.pose(2), s.base);
  }

  void log_wrench(RunLog& log, double t, const Vec3& w) const {
    log.add(t, "wrench", {w(0), w(1), w(2), detector.mean()});
  }

  void log_contact(RunLog& log, double t, const Vec3& w, double theta) const {
    if (w.head<2>().norm() <= locate.force_floor) return;
    const ContactPoint cp = locate_contact(w, s.outline, theta, locate);
    log.add(t, "contact", {cp.point.x(), cp.point.y(), cp.direction.x(), cp.direction.y(),
                           cp.magnitude});
  }
};

struct ObjectTrack {
  std::vector<VecX> truth_p;
  std::vector<VecX> truth_v;
  GaussianBelief belief;
};

std::vector<std::pair<int, int>> all_pairs(int n) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) out.emplace_back(i, j);
  return out;
}

// True object motion is constant velocity; only the tracker assumes the
// configured process noise. Measurements carry the measurement noise.
std::vector<ObjectTrack> sample_truth(const Scenario& s, int ticks) {
  std::vector<ObjectTrack> out;
  for (const ObjectSpec& o : s.objects) {
    ObjectTrack tr;
    for (int k = 0; k < ticks; ++k) {
      tr.truth_p.push_back(o.position + (k * o.noise.dt) * o.velocity);
      tr.truth_v.push_back(o.velocity);
    }
    out.push_back(std::move(tr));
  }
  return out;
}

}  // namespace

KinematicChain chain_named(const std::string& name) {
  if (name == "humanoid_arm") return humanoid_arm();
  if (name == "planar_two_link") return planar_two_link();
  throw InputError("unknown chain '" + name + "'");
}

PlannerRoadmaps planner_roadmaps(const Scenario& s) {
  const KinematicChain chain = chain_named(s.planner.chain);
  PlannerRoadmaps rm;
  auto load = [&](const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open roadmap '" + path + "'");
    return load_roadmap(f, chain);
  };
  PrmOptions u;
  u.budget = s.planner.budget;
  u.seed = stream_seed(s.seed, "planner.unconstrained");
  rm.unconstrained = s.planner.roadmap.empty() ? prm_learn(chain, u) : load(s.planner.roadmap);
  PrmOptions c = u;
  c.seed = stream_seed(s.seed, "planner.constrained");
  c.goal = end_effector(chain, chain.home);
  rm.constrained = s.planner.constrained_roadmap.empty() ? prm_learn(chain, c)
                                                         : load(s.planner.constrained_roadmap);
  if (rm.unconstrained.constrained() || !rm.constrained.constrained()) {
    throw InputError("planner: roadmap files are swapped or lack the end-effector goal");
  }
  return rm;
}

void log_risks(RunLog& log, double t, const std::vector<PairRisk>& risks) {
  for (const PairRisk& r : risks) {
    for (int k = 0; k < static_cast<int>(r.p_ac.size()); ++k) {
      const std::int64_t flag = r.k_c && *r.k_c == k ? 1 : 0;
      log.add(t, "risk", {std::int64_t{k}, fmt::format("{}-{}", r.i, r.j), r.p_ic[k],
                          r.p_ac[k], flag});
    }
  }
}

std::vector<PairRisk> predict_initial(const Scenario& s) {
  if (s.objects.size() < 2) throw InputError("predict: needs at least two objects");
  std::vector<GaussianBelief> beliefs;
  for (const ObjectSpec& o : s.objects) {
    GaussianBelief b;
    b.mean.resize(2 * o.position.size());
    b.mean << o.position, o.velocity;
    const bool noisy = o.noise.sigma_d.sum() + o.noise.sigma_a.sum() + o.noise.sigma_s.sum() > 0;
    b.cov = noisy ? riccati_fixed_point(o.noise) : MatX::Zero(b.mean.size(), b.mean.size());
    beliefs.push_back(b);
  }
  const PredictionConfig& cfg = s.prediction.config;
  std::vector<PairRisk> out;
  for (const auto& [i, j] : all_pairs(static_cast<int>(s.objects.size()))) {
    PairRisk r = cumulative_cp(beliefs[i], beliefs[j], s.objects[i].radius + s.objects[j].radius,
                               s.objects[i].noise, s.objects[j].noise, cfg.horizon_steps(),
                               cfg.eta);
    r.i = i;
    r.j = j;
    out.push_back(std::move(r));
  }
  return out;
}

SimResult run_scenario(const Scenario& s) {
  s.validate();
  SimResult res{RunLog(s.name, s.seed), {}};
  RunLog& log = res.log;
  SimSummary& sum = res.summary;
  const int steps = s.steps();
  const double dt = s.dt;

  BaseState st = consistent_state(s.base, s.pose0, s.velocity0);
  sum.initial_state = st;
  Estimator est(s);
  ReactionController reaction(s.reaction);
  Engine torque_rng = make_engine(s.seed, "sensing.torque");
  Engine wall_rng = make_engine(s.seed, "wall.noise");
  std::normal_distribution<double> gauss;
  std::vector<ImpactState> impacts(s.impacts.size());
  ReactionMode reaction_mode = ReactionMode::kTracking;
  std::optional<std::string> last_command;

  // Wall: unit normal toward the free side, active-set contact.
  Vec2 wall_n(-std::sin(s.wall.angle), std::cos(s.wall.angle));
  if (s.wall.enabled && wall_n.dot(s.pose0.head<2>() - s.wall.point) < 0) wall_n = -wall_n;
  MatX wall_row = MatX::Zero(1, 9);
  wall_row(0, 0) = wall_n.x();
  wall_row(0, 1) = wall_n.y();
  bool wall_active = false;
  WallEstimator wall_est(s.wall.err_threshold);
  auto wall_gap = [&](const BaseState& b) {
    return wall_n.dot(b.pose.head<2>() - s.wall.point);
  };

  // Objects and agent.
  const bool tracking = s.prediction.enabled;
  const int obs_every =
      tracking ? static_cast<int>(std::llround(s.prediction.config.dt / dt)) : 1;
  const int ticks = tracking ? steps / obs_every + 1 : 0;
  const int k_th = s.prediction.config.threshold_step();
  std::vector<ObjectTrack> objects;
  std::vector<Engine> meas_rng;
  const auto pairs = all_pairs(static_cast<int>(s.objects.size()));
  if (tracking) {
    objects = sample_truth(s, ticks + k_th + 1);
    for (const ObjectSpec& o : s.objects) {
      meas_rng.push_back(make_engine(s.seed, "object." + o.name + ".measurement"));
    }
    for (int tk = 0; tk < ticks && !sum.predicted_tick; ++tk) {
      for (int m = 0; m <= k_th && !sum.predicted_tick; ++m) {
        for (const auto& [i, j] : pairs) {
          const double d = (objects[i].truth_p[tk + m] - objects[j].truth_p[tk + m]).norm();
          if (d <= s.objects[i].radius + s.objects[j].radius) {
            sum.predicted_tick = tk;
            break;
          }
        }
      }
    }
  }
  AgentState agent;
  sum.modes.push_back(agent.mode);
  std::optional<PlannerRoadmaps> roadmaps;
  KinematicChain chain;
  VecX q_arm;
  std::optional<Plan> plan;
  std::vector<VecX> path;
  std::size_t path_idx = 0;
  if (s.planner.enabled) {
    roadmaps = planner_roadmaps(s);
    chain = roadmaps->unconstrained.chain();
    q_arm = chain.home;
  }
  PlannerOptions popt;
  popt.connect_candidates = s.planner.connect_candidates;
  popt.goal_tolerance = s.planner.goal_tolerance;

  auto agent_tick = [&](int tk, double t) {
    for (std::size_t o = 0; o < s.objects.size(); ++o) {
      const ObjectSpec& spec = s.objects[o];
      VecX y = objects[o].truth_p[tk];
      for (Eigen::Index d = 0; d < y.size(); ++d) {
        y(d) += std::sqrt(spec.noise.sigma_s(d)) * gauss(meas_rng[o]);
      }
      objects[o].belief = tk == 0 ? kf_init(y, spec.noise, s.prediction.velocity_var)
                                  : kf_step(objects[o].belief, y, spec.noise);
      const Vec3 p = pad3(objects[o].belief.position());
      const Vec3 v = pad3(objects[o].belief.velocity());
      log.add(t, "object", {spec.name, p(0), p(1), p(2), v(0), v(1), v(2)});
    }
    std::vector<PairRisk> risks;
    FsmInput in;
    in.t = t;
    std::vector<std::pair<int, int>> threats;
    for (const auto& [i, j] : pairs) {
      PairRisk r = cumulative_cp(objects[i].belief, objects[j].belief,
                                 s.objects[i].radius + s.objects[j].radius, s.objects[i].noise,
                                 s.objects[j].noise, s.prediction.config.horizon_steps(),
                                 s.prediction.config.eta);
      r.i = i;
      r.j = j;
      const double p_th = r.p_ac[k_th];
      in.p_ac.push_back(p_th);
      const VecX dp = objects[i].belief.position() - objects[j].belief.position();
      const VecX dv = objects[i].belief.velocity() - objects[j].belief.velocity();
      in.approach.push_back(dp.dot(dv));
      if (p_th >= s.prediction.config.eta) threats.emplace_back(i, j);
      risks.push_back(std::move(r));
    }
    log_risks(log, t, risks);
    in.at_home = !s.planner.enabled || (q_arm - chain.home).lpNorm<Eigen::Infinity>() < 1e-9;
    const AgentMode before = agent.mode;
    agent = fsm_step(agent, in, s.prediction.fsm);
    if (agent.mode != before) {
      sum.modes.push_back(agent.mode);
      log.add(t, "event", {std::string("mode"), to_string(before) + "->" + to_string(agent.mode)});
      if (agent.mode == AgentMode::kIntervention && !sum.trigger_tick) sum.trigger_tick = tk;
    }
    std::pair<int, int> chosen{-1, -1};
    double p_log = 0.0;
    if (!threats.empty()) {
      std::vector<ObjectState> states;
      for (const ObjectTrack& o : objects) {
        states.push_back({o.belief.position(), o.belief.velocity()});
      }
      chosen = select_imminent_pair(threats, states);
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        if (pairs[k] == chosen) p_log = in.p_ac[k];
      }
    }
    log.add(t, "agent",
            {to_string(agent.mode),
             chosen.first < 0 ? std::string("none") : fmt::format("{}-{}", chosen.first, chosen.second),
             p_log});

    if (!s.planner.enabled) return;
    if (agent.mode == AgentMode::kIntervention && chosen.first >= 0) {
      const auto [i, j] = chosen;
      const int mover =
          objects[i].belief.velocity().norm() >= objects[j].belief.velocity().norm() ? i : j;
      const int other = mover == i ? j : i;
      const std::optional<double> tca =
          closest_approach(objects[mover].belief.position(), objects[mover].belief.velocity(),
                           objects[other].belief.position(), objects[other].belief.velocity());
      const ObjectSweep sweep{objects[mover].belief.position(),
                              objects[mover].belief.velocity(), s.objects[mover].radius,
                              tca ? std::max(*tca, 1e-6) : s.prediction.config.t_threshold};
      try {
        const Decision d = decide_and_plan(roadmaps->constrained, roadmaps->unconstrained, q_arm,
                                           before, plan ? &*plan : nullptr, sweep, popt);
        if (sum.branches.empty() || sum.branches.back() != d.branch) {
          sum.branches.push_back(d.branch);
        }
        log.add(t, "plan",
                {to_string(d.branch), std::int64_t{d.link},
                 std::int64_t(d.plan ? d.plan->path.size() : 0),
                 std::int64_t{d.constraint_violated ? 1 : 0}});
        if (d.plan && d.branch != DecisionBranch::kReusePlan) {
          plan = d.plan;
          path = d.plan->path;
          path_idx = 0;
        }
      } catch (const PlanError& e) {
        log.add(t, "event", {std::string("plan_error"), std::string("no_connection")});
      }
    } else if (agent.mode == AgentMode::kReturn) {
      if (path.empty() || (path.back() - chain.home).norm() > 0) {
        path = {q_arm, chain.home};
        path_idx = 0;
        plan.reset();
      }
    } else if (agent.mode == AgentMode::kIdle) {
      path.clear();
      plan.reset();
    }
    // Kinematic execution at a joint speed limit.
    double budget = s.planner.joint_speed * s.prediction.config.dt;
    while (path_idx < path.size() && budget > 0) {
      const VecX delta = path[path_idx] - q_arm;
      const double dist = delta.lpNorm<Eigen::Infinity>();
      if (dist <= budget) {
        q_arm = path[path_idx++];
        budget -= dist;
      } else {
        q_arm += delta * (budget / dist);
        budget = 0;
      }
    }
    const double ee_err = (end_effector(chain, q_arm) - end_effector(chain, chain.home)).norm();
    log.add(t, "arm", {joined(q_arm), ee_err});
  };

  bool pending_detection = false;
  Vec2 latched_force = Vec2::Zero();
  for (int k = 0; k <= steps; ++k) {
    const double t = k * dt;
    const double t_next = (k + 1) * dt;
    if (tracking && k % obs_every == 0) agent_tick(k / obs_every, t);
    if (!s.base_enabled) continue;
    const bool log_now = k % s.log_every == 0 || k == steps;
    if (log_now) log.add(t, "state", state_values(st, mode_name(reaction_mode)));
    if (k == steps) break;

    // External loads.
    Wrench ext;
    const Mat2 r = rot(st.pose(2));
    for (const PushEvent& e : s.pushes) {
      if (t >= e.t0 && t < e.t0 + e.duration) ext.add(r * e.force, r * e.point);
    }
    for (std::size_t i = 0; i < impacts.size(); ++i) {
      const ImpactEvent& e = s.impacts[i];
      ImpactState& im = impacts[i];
      if (im.done || t < e.t0) continue;
      if (!sum.first_impact) sum.first_impact = e.t0;
      if (t < e.t0 + e.bumper.delay) continue;
      const Vec2 off = r * e.point;
      if (!im.engaged) {
        im.engaged = true;
        im.direction = (r * e.direction).normalized();
        im.s_dummy = im.direction.dot(st.pose.head<2>() + off);
        im.v_dummy = e.speed;
        log.add(t, "event", {std::string("impact"), e.bumper.name});
      }
      const double pos = im.direction.dot(st.pose.head<2>() + off);
      const double vel = im.direction.dot(point_velocity(st, off));
      const double pen = im.s_dummy - pos;
      const double f =
          pen > 0 ? std::max(0.0, e.bumper.stiffness * pen + e.bumper.damping * (im.v_dummy - vel))
                  : 0.0;
      ext.add(f * im.direction, off);
      const double drive = t < e.t0 + e.bumper.delay + e.drive_duration ? e.drive : 0.0;
      im.v_dummy += dt * (drive - f) / e.mass;
      im.s_dummy += dt * im.v_dummy;
      if (drive == 0.0 && pen <= 0 && im.v_dummy <= vel) im.done = true;
    }
    std::optional<ExternalWrench> ext_w;
    if (ext.force.norm() > 0 || ext.moment != 0) {
      ext_w = ExternalWrench{ext.force, ext.moment, st.pose.head<2>()};
    }

    // Controller: plan, reaction, wall following, then OSC.
    const PlanSample ps = plan_at(s, t);
    Vec3 target = ps.x, target_dot = ps.v, ff = ps.a;
    if (s.reaction_enabled) {
      const ReactionOutput ro =
          reaction.step(t, dt, ps.x, ps.v, pending_detection, latched_force, st.pose);
      pending_detection = false;
      if (ro.entered_escape) {
        if (!sum.escape_onset) sum.escape_onset = reaction.onset_pose();
        log.add(t, "event", {std::string("escape"), fmt::format("{} {}", reaction.latched_force().x(),
                                                                reaction.latched_force().y())});
      }
      if (ro.mode == ReactionMode::kEscape) ff.setZero();
      if (reaction_mode == ReactionMode::kEscape && ro.mode == ReactionMode::kTracking) {
        est.detector.reset();  // re-arm after the re-merge completes
        log.add(t, "event", {std::string("tracking"), std::string("remerged")});
      }
      reaction_mode = ro.mode;
      target = ro.target;
      target_dot = ro.target_dot;
    }
    if (s.wall.enabled && wall_est.points().size() >= static_cast<std::size_t>(s.wall.min_fit_points)) {
      // Keep the command on the fitted wall, pressed in by the preload.
      if (const std::optional<WallFit> fit = wall_est.fit()) {
        Vec2 mean = Vec2::Zero();
        for (const Vec2& p : wall_est.points()) mean += p;
        mean /= static_cast<double>(wall_est.points().size());
        Vec2 n(-std::sin(fit->angle), std::cos(fit->angle));
        if (n.dot(wall_n) < 0) n = -n;
        const double d = n.dot(target.head<2>() - mean);
        if (d < 0) {
          target.head<2>() -= (d + s.wall.preload) * n;
          target_dot.head<2>() -= n.dot(target_dot.head<2>()) * n;
          ff.head<2>() -= n.dot(ff.head<2>()) * n;
        }
      }
    }
    Vec3 tau = Vec3::Zero();
    if (s.control.mode == ControlMode::kOsc) {
      const Vec3 e = pose_error(target, st.pose);
      const Vec3 ed = target_dot - st.pose_dot;
      Vec3 a_ref = ff;
      a_ref.head<2>() += s.control.kp * e.head<2>() + s.control.kd * ed.head<2>();
      a_ref(2) += s.control.kp_yaw * e(2) + s.control.kd_yaw * ed(2);
      tau = osc_command(s, st, a_ref);
    }

    // Plant, with the wall as a unilateral constraint.
    DynamicsSolution dyn;
    if (wall_active) {
      VecX lam;
      dyn = forward_dynamics_constrained(s.base, s.friction, s.slope, st, tau, ext_w, wall_row,
                                         &lam);
      if (lam(0) > 0) {  // the wall would have to pull
        wall_active = false;
        log.add(t, "event", {std::string("wall_release"), fmt::format("{}", -lam(0))});
      }
    }
    if (!wall_active) dyn = forward_dynamics(s.base, s.friction, s.slope, st, tau, ext_w);

    // Sensing and estimation.
    Vec3 sensed = tau;
    for (const TorqueFault& f : s.faults) {
      if (t >= f.t0 && t < f.t0 + f.duration) sensed(f.wheel) += f.offset;
    }
    if (s.torque_noise > 0) {
      for (int i = 0; i < 3; ++i) sensed(i) += s.torque_noise * gauss(torque_rng);
    }
    const Vec3 w = est.wrench(st, dyn.qdd, sensed);
    const bool was_fired = est.detector.fired();
    if (est.detector.push(w.head<2>().norm()) && !was_fired) {
      pending_detection = true;
      latched_force = w.head<2>();
      if (!sum.detection) sum.detection = t;
      log.add(t, "event", {std::string("detect"), fmt::format("{}", est.detector.mean())});
      est.log_contact(log, t, w, st.pose(2));
    }
    if (s.commands_enabled && w.head<2>().norm() >= CommandSet::table().trigger) {
      const ContactPoint cp = locate_contact(w, s.outline, st.pose(2), est.locate);
      const std::vector<Touch> touches{
          {BodyPart::kBody, cp.point, cp.magnitude * cp.direction}};
      const std::optional<std::string> cmd = match_command(touches, CommandSet::table());
      if (cmd && cmd != last_command) log.add(t, "event", {std::string("command"), *cmd});
      last_command = cmd;
    }
    if (log_now) {
      log.add(t, "dynamics", dynamics_values(st, dyn.qdd));
      log.add(t, "torque", {tau(0), tau(1), tau(2), sensed(0), sensed(1), sensed(2)});
      est.log_wrench(log, t, w);
    }

    // Integrate, then resolve wall contact.
    integrate_semi_implicit(s.base, st, dyn.qdd, dt, true,
                            wall_active ? wall_row : MatX());
    if (s.wall.enabled) {
      const double gap = wall_gap(st);
      if (!wall_active && gap < 0) {
        // Inelastic impact: back onto the surface, normal velocity removed.
        st.pose.head<2>() -= gap * wall_n;
        integrate_semi_implicit(s.base, st, Vec9::Zero(), 0.0, true, wall_row);
        wall_active = true;
        log.add(t_next, "event", {std::string("wall_contact"), fmt::format("{}", gap)});
      }
      const double vn = wall_n.dot(st.pose_dot.head<2>());
      if (wall_active) {
        ++sum.wall_contact_steps;
        sum.max_wall_normal_velocity = std::max(sum.max_wall_normal_velocity, std::abs(vn));
      }
      Vec2 measured = st.pose.head<2>();
      if (s.wall.noise > 0) {
        measured += s.wall.noise * Vec2(gauss(wall_rng), gauss(wall_rng));
      }
      wall_est.update(plan_at(s, t_next).x.head<2>(), measured);
      if ((k + 1) % s.log_every == 0 || k + 1 == steps) {
        const std::optional<WallFit> fit = wall_est.fit();
        log.add(t_next, "wall",
                {gap, vn, std::int64_t{wall_active ? 1 : 0}, fit && !fit->vertical ? fit->slope : 0.0,
                 std::int64_t(wall_est.points().size())});
      }
    }
    sum.max_rolling_residual = std::max(sum.max_rolling_residual, rolling_residual(s.base, st));
    check_finite(st, t_next);
  }
  if (s.wall.enabled) sum.wall_fit = wall_est.fit();
  sum.final_state = st;
  if (sum.escape_onset) {
    sum.final_displacement = (st.pose.head<2>() - sum.escape_onset->head<2>()).norm();
  }
  return res;
}

RunLog reestimate(const Scenario& s, const RunLog& in) {
  RunLog out(in.scenario(), in.seed());
  Estimator est(s);
  const std::vector<Record> states = in.of_kind("state");
  const std::vector<Record> dyn = in.of_kind("dynamics");
  const std::vector<Record> tq = in.of_kind("torque");
  std::size_t si = 0, ti = 0;
  for (const Record& d : dyn) {
    while (si < states.size() && states[si].t < d.t) ++si;
    while (ti < tq.size() && tq[ti].t < d.t) ++ti;
    if (si == states.size() || ti == tq.size() || states[si].t != d.t || tq[ti].t != d.t) {
      throw InputError(fmt::format("reestimate: no state or torque record at t = {}", d.t));
    }
    BaseState st;
    for (int i = 0; i < 3; ++i) {
      st.pose(i) = as_double(states[si].values[i]);
      st.pose_dot(i) = as_double(states[si].values[3 + i]);
      st.qw_dot(i) = as_double(d.values[i]);
      st.qr_dot(i) = as_double(d.values[3 + i]);
    }
    Vec9 qdd;
    for (int i = 0; i < 9; ++i) qdd(i) = as_double(d.values[6 + i]);
    Vec3 sensed;
    for (int i = 0; i < 3; ++i) sensed(i) = as_double(tq[ti].values[3 + i]);
    const Vec3 w = est.wrench(st, qdd, sensed);
    const bool was_fired = est.detector.fired();
    const bool fired = est.detector.push(w.head<2>().norm()) && !was_fired;
    est.log_wrench(out, d.t, w);
    if (fired) {
      out.add(d.t, "event", {std::string("detect"), fmt::format("{}", est.detector.mean())});
      est.log_contact(out, d.t, w, st.pose(2));
    }
  }
  return out;
}

}  // namespace omnisafe
