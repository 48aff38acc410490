#include "omnisafe/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "omnisafe/contact.hpp"
#include "omnisafe/fsm.hpp"
#include "omnisafe/geometry.hpp"
#include "omnisafe/planner.hpp"
#include "omnisafe/prediction.hpp"
#include "omnisafe/simulate.hpp"
#include "omnisafe/torque_loop.hpp"
#include "omnisafe/wbosc.hpp"

namespace omnisafe {

namespace {

struct Check {
  bool pass = true;
  std::string detail;

  // Records a failed condition; the first failure leads the detail.
  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail.clear();
      pass = false;
      detail = detail.empty() ? what : detail + "; " + what;
    }
  }
  void note(const std::string& what) {
    if (pass) detail = detail.empty() ? what : detail + "; " + what;
  }
};

Scenario scenario_from(const std::string& text, const VerifyOptions& opt) {
  std::istringstream is(text);
  Scenario s = parse_scenario(is, "<acceptance>");
  if (opt.faults.count("roller-friction")) s.estimator_friction.magnitude *= 1.1;
  s.validate();
  return s;
}

BaseState random_state(std::mt19937_64& rng, const BaseParams& p) {
  std::normal_distribution<double> g;
  const Vec3 pose(g(rng), g(rng), g(rng));
  const Vec3 vel(0.5 * g(rng), 0.5 * g(rng), 0.5 * g(rng));
  return consistent_state(p, pose, vel);
}

MatX random_mat(std::mt19937_64& rng, int r, int c) {
  std::normal_distribution<double> g;
  MatX m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
}

MatX random_spd(std::mt19937_64& rng, int n, double scale = 1.0, double shift = -1.0) {
  const MatX b = random_mat(rng, n, n);
  return scale * (b * b.transpose() + (shift < 0 ? n : shift) * MatX::Identity(n, n));
}

MatX random_selector(std::mt19937_64& rng, int m, int n) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  MatX u = MatX::Zero(m, n);
  for (int i = 0; i < m; ++i) u(i, idx[i]) = 1.0;
  return u;
}

ConstrainedSystem random_system(std::mt19937_64& rng, int n, int k, int m) {
  return {random_spd(rng, n), random_mat(rng, k, n), random_selector(rng, m, n)};
}

double wrap(double a) { return std::abs(std::remainder(a, 2.0 * kPi)); }

// 1. Gravity hold on a 10 degree slope.
Check gravity_hold(const VerifyOptions& opt) {
  const Scenario s = scenario_from(R"(
name = gravity-hold
sim.duration = 10
slope.angle_deg = 10
slope.heading_deg = 30
control.kp = 0
control.kd = 0
control.kp_yaw = 0
control.kd_yaw = 0
)",
                                   opt);
  const SimResult r = run_scenario(s);
  double drift = 0.0;
  for (const Record& rec : r.log.of_kind("state")) {
    drift = std::max(drift, std::hypot(as_double(rec.values[0]), as_double(rec.values[1])));
  }
  Check c;
  c.require(drift < 0.01, fmt::format("drift {:.3g} m exceeds 1 cm", drift));
  c.note(fmt::format("max drift {:.3g} m over 10 s", drift));
  return c;
}

// 2. Escape displacement with threshold 0.8 N, B = 1.6, M = 2.
Check escape_geometry(const VerifyOptions& opt) {
  const Scenario s = scenario_from(R"(
name = motionless-collision
sim.duration = 10
detector.threshold = 0.8
reaction.enabled = true
reaction.mass = 2
reaction.damping = 1.6
reaction.remerge = false
event.push.type = push
event.push.t0 = 1
event.push.duration = 0.1
event.push.point = 0.2,0
event.push.force = -10,0
)",
                                   opt);
  const SimResult r = run_scenario(s);
  Check c;
  c.require(r.summary.escape_onset.has_value(), "no escape");
  const double d = r.summary.final_displacement;
  c.require(std::abs(d - 0.5) <= 0.01, fmt::format("displacement {:.4f} m outside 0.5 +- 2%", d));
  c.note(fmt::format("escape displacement {:.4f} m", d));
  return c;
}

struct PushSample {
  Vec3 nominal;
  Vec3 sensed;
  Vec2 point;
  double angle;
  double magnitude;
  double theta;
};

PushSample random_push(std::mt19937_64& rng, const BaseParams& p, const BodyOutline& o,
                       double mag_lo, double mag_hi) {
  std::uniform_real_distribution<double> u(0, 1);
  std::normal_distribution<double> g;
  const BaseState s = random_state(rng, p);
  const Vec3 t(g(rng), g(rng), g(rng));
  const Vec2 pt = o.boundary_point(u(rng));
  const Vec2 n = o.outward_normal_at(pt);
  const double a = std::atan2(-n.y(), -n.x()) + (2 * u(rng) - 1) * kPi / 3.0;
  const double mag = mag_lo + (mag_hi - mag_lo) * u(rng);
  const Vec2 f = mag * Vec2(std::cos(a), std::sin(a));
  const double th = s.pose(2);
  const Vec3 w = boundary_push_wrench(pt, f, th);
  ExternalWrench ext;
  ext.force = w.head<2>();
  ext.point = s.pose.head<2>() + Eigen::Rotation2Dd(th) * pt;
  const DynamicsSolution d = forward_dynamics(p, {}, {}, s, t, ext);
  const Vec3 tn =
      nominal_torque(p, {}, s, d.qdd.head<3>(), d.qdd.segment<3>(3), d.qdd.tail<3>());
  return {tn, t, pt, a, mag, th};
}

// 3. Wrench round trip, noiseless and with stiction attenuation.
Check wrench_round_trip(const VerifyOptions&) {
  const BaseParams p;
  const BodyOutline o = BodyOutline::triangle();
  std::mt19937_64 rng(99);
  Check c;
  double worst_loc = 0, worst_dir = 0, worst_mag = 0;
  for (int k = 0; k < 500; ++k) {
    const PushSample ps = random_push(rng, p, o, 1.0, 10.0);
    const ContactPoint cp =
        locate_contact(estimate_wrench(ps.nominal, ps.sensed, ps.theta, p), o, ps.theta);
    worst_loc = std::max(worst_loc, (cp.point - ps.point).norm());
    worst_dir = std::max(worst_dir,
                         wrap(std::atan2(cp.direction.y(), cp.direction.x()) - ps.angle));
    worst_mag = std::max(worst_mag, std::abs(cp.magnitude - ps.magnitude));
  }
  c.require(worst_loc <= 1e-6, fmt::format("location error {:.3g} m", worst_loc));
  c.require(worst_dir <= 1e-6, fmt::format("direction error {:.3g} rad", worst_dir));
  c.require(worst_mag <= 1e-6, fmt::format("magnitude error {:.3g} N", worst_mag));

  const StictionModel sm;
  Engine srng = make_engine(20240607, "acceptance.stiction");
  LocateOptions lo;
  lo.on_miss = MissPolicy::kNearest;
  double sum_loc = 0, sum_dir = 0;
  const int n = 500;
  for (int k = 0; k < n; ++k) {
    const PushSample ps = random_push(rng, p, o, 9.0, 10.0);
    const Vec3 ts = sm.attenuate(ps.nominal, ps.sensed, sm.sample(srng));
    const ContactPoint cp =
        locate_contact(estimate_wrench(ps.nominal, ts, ps.theta, p), o, ps.theta, lo);
    sum_loc += (cp.point - ps.point).norm();
    sum_dir += wrap(std::atan2(cp.direction.y(), cp.direction.x()) - ps.angle);
  }
  const double mean_loc = sum_loc / n, mean_dir = sum_dir / n / (2 * kPi);
  c.require(mean_loc <= 0.045, fmt::format("stiction mean location error {:.4f} m", mean_loc));
  c.require(mean_dir <= 0.02, fmt::format("stiction mean direction error {:.4f} circle", mean_dir));
  c.note(fmt::format("noiseless worst {:.2g} m / {:.2g} rad / {:.2g} N; stiction mean {:.4f} m, "
                     "{:.2f}% of circle",
                     worst_loc, worst_dir, worst_mag, mean_loc, 100 * mean_dir));
  return c;
}

std::optional<double> impact_latency(const std::string& bumper, bool moving,
                                     const VerifyOptions& opt) {
  std::string text = fmt::format(R"(
name = impact-{0}
sim.duration = 2
reaction.enabled = true
reaction.remerge = false
event.hit.type = impact
event.hit.t0 = 0.5
event.hit.bumper = {0}
event.hit.point = 0.2,0
event.hit.direction = -1,0
)",
                                 bumper);
  if (moving) {
    // Base driving into a resting dummy.
    text += R"(
plan.kind = line
plan.velocity = 0.22,0
base.velocity = 0.22,0,0
event.hit.mass = 13.62
event.hit.speed = 0
event.hit.drive = 0
)";
  } else {
    text += R"(
event.hit.mass = 9.08
event.hit.speed = 0.5
event.hit.drive = 44.54
)";
  }
  const SimResult r = run_scenario(scenario_from(text, opt));
  if (!r.summary.detection || !r.summary.first_impact) return std::nullopt;
  return *r.summary.detection - *r.summary.first_impact;
}

// 4. Detection latency of the 40-sample window for the bumper presets.
Check detection_latency(const VerifyOptions& opt) {
  Check c;
  std::string lat;
  for (const auto& [bumper, moving] : std::vector<std::pair<std::string, bool>>{
           {"pu", false}, {"spring", false}, {"magnet", false}, {"magnet", true}}) {
    const std::string label = moving ? bumper + " moving" : bumper;
    const std::optional<double> l = impact_latency(bumper, moving, opt);
    c.require(l.has_value(), label + ": no detection");
    if (!l) continue;
    c.require(*l >= 0.045 - 1e-9 && *l <= 0.110 + 1e-9,
              fmt::format("{}: {:.0f} ms outside 45-110 ms", label, 1e3 * *l));
    lat += fmt::format("{}{} {:.0f} ms", lat.empty() ? "" : ", ", label, 1e3 * *l);
  }
  c.note(lat);
  return c;
}

// 5. Smith predictor against plain P on a 5-step delay.
Check smith_predictor(const VerifyOptions&) {
  Check c;
  const TorqueGains g = TorqueGains::with_default_ff(10.0, 1.0);
  const Signal step = [](int) { return 1.0; };
  const LoopTrace plain = run_loop(DelayedPlant(1.0, 5),
                                   TorqueController(g, LoopMode::kPlainP, 5), step, Signal(), 500);
  double peak = 0.0;
  for (double v : plain.tau_s) peak = std::max(peak, std::isfinite(v) ? std::abs(v) : 1e300);
  c.require(peak > 1e3, fmt::format("plain P peak {:.3g} did not diverge", peak));
  const LoopTrace smith = run_loop(DelayedPlant(1.0, 5),
                                   TorqueController(g, LoopMode::kSmith, 5), step, Signal(), 500);
  const double err = std::abs(smith.tau_s.back() - 1.0);
  c.require(err < 1e-6, fmt::format("smith error {:.3g} at step 500", err));
  const Signal impulse = [](int n) { return n == 0 ? 1.0 : 0.0; };
  const LoopTrace si = run_loop(DelayedPlant(1.0, 5), TorqueController(g, LoopMode::kSmith, 5),
                                impulse, Signal(), 500);
  const LoopTrace ideal = run_ideal_loop(g, 1.0, impulse, Signal(), 500);
  double shift = 0.0;
  for (int n = 0; n < 500; ++n) {
    shift = std::max(shift, std::abs(si.tau_s[n] - (n >= 5 ? ideal.tau_s[n - 5] : 0.0)));
  }
  c.require(shift <= 1e-9, fmt::format("impulse shift residual {:.3g}", shift));
  c.note(fmt::format("plain peak {:.3g}, smith error {:.2g}, impulse residual {:.2g}", peak, err,
                     shift));
  return c;
}

// 6. Spring outer loop frequency.
Check spring_loop(const VerifyOptions&) {
  SpringLoopConfig cfg;
  cfg.stiffness = 4.48;
  cfg.load_inertia = 0.71;
  cfg.duration = 30.0;
  const TorqueGains g = TorqueGains::with_default_ff(10.0, 1.0);
  const SpringTrace tr =
      spring_outer_loop(cfg, DelayedPlant(1.0, 5), TorqueController(g, LoopMode::kSmith, 5));
  const double f = oscillation_frequency(tr.theta, tr.dt);
  Check c;
  c.require(std::abs(f - 0.4) <= 0.02, fmt::format("frequency {:.4f} Hz", f));
  c.note(fmt::format("frequency {:.4f} Hz", f));
  return c;
}

double pdf_quadrature_1d(double m, double var, double omega) {
  const double s = std::sqrt(var);
  auto f = [&](double x) {
    const double u = (x - m) / s;
    return std::exp(-0.5 * u * u) / (s * std::sqrt(2.0 * kPi));
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -omega, omega, 20,
                                                                        1e-14);
}

// 7. Instantaneous probability against Monte Carlo and quadrature.
Check collision_probability(const VerifyOptions&) {
  Check c;
  std::mt19937_64 rng(20240607);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.05, 2.0);
  const long n = 1000000;
  int exceed = 0;
  double worst_z = 0.0;
  for (int k = 0; k < 200; ++k) {
    const int d = 1 + k % 3;
    VecX mi(d), mj(d);
    for (int i = 0; i < d; ++i) {
      mi(i) = 0.3 * g(rng);
      mj(i) = 0.3 * g(rng);
    }
    const MatX si = random_spd(rng, d, 0.05, 0.05), sj = random_spd(rng, d, 0.05, 0.05);
    const double omega = 0.1 + 0.4 * std::uniform_real_distribution<double>(0, 1)(rng);
    const double p = instantaneous_cp(mi, si, mj, sj, omega);
    // The difference of independent Gaussians is Gaussian; sample it directly.
    const MatX l = Eigen::LLT<MatX>(si + sj).matrixL();
    const VecX mu = mi - mj;
    long hit = 0;
    VecX z(d);
    for (long s = 0; s < n; ++s) {
      for (int i = 0; i < d; ++i) z(i) = g(rng);
      if ((mu + l * z).squaredNorm() <= omega * omega) ++hit;
    }
    const double est = static_cast<double>(hit) / static_cast<double>(n);
    const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / static_cast<double>(n));
    const double zscore = std::abs(p - est) / se;
    worst_z = std::max(worst_z, zscore);
    if (zscore >= 3.0) ++exceed;
  }
  c.require(exceed == 0, fmt::format("{} of 200 cases beyond 3 SE (worst {:.2f})", exceed, worst_z));
  double worst_q = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double omega = u(rng), var = u(rng) * u(rng);
    const double dmu = 3.0 * u(rng) - 3.0;
    worst_q = std::max(worst_q, std::abs(closed_form_1d(dmu, var, omega) -
                                         pdf_quadrature_1d(dmu, var, omega)));
  }
  c.require(worst_q <= 1e-10, fmt::format("closed form vs quadrature {:.3g}", worst_q));
  c.note(fmt::format("worst MC deviation {:.2f} SE; closed form vs quadrature {:.2g}", worst_z,
                     worst_q));
  return c;
}

GaussianBelief belief(const VecX& p, const VecX& v, double pos_var, double vel_var) {
  const int d = static_cast<int>(p.size());
  GaussianBelief b;
  b.mean = VecX(2 * d);
  b.mean << p, v;
  b.cov = MatX::Zero(2 * d, 2 * d);
  b.cov.topLeftCorner(d, d) = pos_var * MatX::Identity(d, d);
  b.cov.bottomRightCorner(d, d) = vel_var * MatX::Identity(d, d);
  return b;
}

// 8. Accumulated probability is a bounded monotone series.
Check cumulative_probability(const VerifyOptions&) {
  Check c;
  std::mt19937_64 rng(61);
  std::normal_distribution<double> g;
  int bad = 0;
  for (int s = 0; s < 100; ++s) {
    const int d = 1 + s % 3;
    const NoiseParams n = NoiseParams::table(d);
    auto rv = [&] { return VecX(VecX::NullaryExpr(d, [&] { return g(rng); })); };
    const GaussianBelief a = belief(rv(), rv(), 0.01 + 0.05 * std::abs(g(rng)), 0.05);
    const GaussianBelief b = belief(rv(), rv(), 0.01 + 0.05 * std::abs(g(rng)), 0.05);
    const PairRisk r = cumulative_cp(a, b, 0.1 + 0.3 * std::abs(g(rng)), n, n, 60);
    for (std::size_t k = 0; k < r.p_ac.size(); ++k) {
      if (r.p_ac[k] < 0 || r.p_ac[k] > 1 || (k > 0 && r.p_ac[k] < r.p_ac[k - 1])) {
        ++bad;
        break;
      }
    }
  }
  c.require(bad == 0, fmt::format("{} of 100 series not monotone in [0, 1]", bad));
  const NoiseParams n = NoiseParams::noiseless(2);
  const double omega = 0.2, gap = 2.0, speed = 0.5;
  const PairRisk r = cumulative_cp(belief(Vec2(0, 0), Vec2(speed, 0), 1e-10, 0.0),
                                   belief(Vec2(gap, 0), Vec2(-speed, 0), 1e-10, 0.0), omega, n,
                                   n, 150, 0.999);
  int contact = 0;
  while (gap - 2 * speed * contact * n.dt > omega) ++contact;
  c.require(r.k_c && std::abs(*r.k_c - contact) <= 1,
            fmt::format("head-on crossing {} vs contact step {}", r.k_c ? *r.k_c : -1, contact));
  c.note(fmt::format("100 series monotone; head-on crosses at {} (contact {})",
                     r.k_c ? *r.k_c : -1, contact));
  return c;
}

// 9. Constraint and hierarchy identities.
Check appendix_identities(const VerifyOptions&) {
  Check c;
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> dn(5, 10);
  double r1 = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int n = dn(rng);
    const int k = std::uniform_int_distribution<int>(1, n - 2)(rng);
    const int m = std::uniform_int_distribution<int>(n - k, n)(rng);
    const ConstrainedSystem s = random_system(rng, n, k, m);
    const ConstraintOps co = constraint_operators(s);
    const MatX unc = s.U * co.Nc;
    const MatX bar = co.Ainv * unc.transpose() * pinv(unc * co.Ainv * unc.transpose());
    r1 = std::max(r1, max_abs(bar * unc - co.Nc));
  }
  c.require(r1 <= 1e-9, fmt::format("UN_c identity residual {:.3g}", r1));

  double r2 = 0.0;
  for (int t = 0; t < 50; ++t) {
    const ConstrainedSystem s = random_system(rng, 10, 2, 9);
    const ConstraintOps co = constraint_operators(s);
    const TaskOps base = task_operators(s, co, {random_mat(rng, 1, 10), VecX()});
    const MatX phi = actuated_inverse_inertia(s, co);
    std::vector<MatX> js;
    for (int lvl = 0; lvl < 3; ++lvl) js.push_back(random_mat(rng, 2, 10) * base.UNc_bar);
    const std::vector<MatX> ns = prioritized_nullspaces(phi, js);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < i; ++j) r2 = std::max(r2, max_abs(ns[i] * ns[j] - ns[j] * ns[i]));
  }
  c.require(r2 <= 1e-9, fmt::format("null-space commutation residual {:.3g}", r2));

  double r3 = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int n = 8, k = 2, m = 7, tdim = 3;
    const ConstrainedSystem s = random_system(rng, n, k, m);
    const ConstraintOps co = constraint_operators(s);
    const TaskSpec task{random_mat(rng, tdim, n), random_mat(rng, tdim, 1)};
    const TaskOps op = task_operators(s, co, task);
    const VecX tau = op.J_star.transpose() * op.Lambda_star * task.xdd_des;
    const MatX unc = s.U * co.Nc;
    const MatX cmat = task.J * co.Ainv * unc.transpose();
    const MatX phi = unc * co.Ainv * unc.transpose();
    MatX kkt = MatX::Zero(m + tdim, m + tdim);
    kkt.topLeftCorner(m, m) = 2.0 * phi;
    kkt.topRightCorner(m, tdim) = cmat.transpose();
    kkt.bottomLeftCorner(tdim, m) = cmat;
    VecX rhs = VecX::Zero(m + tdim);
    rhs.tail(tdim) = task.xdd_des;
    const VecX ref = (pinv(kkt) * rhs).head(m);
    const double cost = tau.dot(phi * tau), cost_ref = ref.dot(phi * ref);
    r3 = std::max(r3, std::abs(cost - cost_ref) / std::max(1.0, cost_ref));
  }
  c.require(r3 <= 1e-8, fmt::format("minimum-effort gap {:.3g}", r3));
  c.note(fmt::format("residuals {:.2g} / {:.2g} / {:.2g}", r1, r2, r3));
  return c;
}

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

// 10. Multicontact estimator.
Check multicontact(const VerifyOptions&) {
  Check c;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + k % 4;
    std::vector<Vec2> loc;
    for (int i = 0; i < n; ++i) loc.emplace_back(0.3 * g(rng), 0.3 * g(rng));
    const Vec3 net(g(rng), g(rng), g(rng));
    const auto f = multicontact_estimate({loc, net, {}});
    const VecX want = kkt_min_norm(contact_map(loc), net);
    VecX got(2 * n);
    for (int i = 0; i < n; ++i) got.segment<2>(2 * i) = f[i];
    worst = std::max(worst, (got - want).norm());
  }
  c.require(worst <= 1e-9, fmt::format("min-norm vs KKT {:.3g}", worst));
  const std::vector<Vec2> loc{Vec2(0.1, 0.25), Vec2(-0.15, -0.1)};
  const Vec2 f1(0.0, 10.0), f2(10.0, 0.0);
  const Vec3 net = contact_map(loc) * (VecX(4) << f1, f2).finished();
  const auto prior = multicontact_estimate({loc, net, f1.normalized()});
  const double e1 = (prior[0] - f1).norm() / f1.norm(), e2 = (prior[1] - f2).norm() / f2.norm();
  c.require(e1 <= 0.05 && e2 <= 0.05,
            fmt::format("prior recovery errors {:.1f}% / {:.1f}%", 100 * e1, 100 * e2));
  c.note(fmt::format("KKT residual {:.2g}; prior recovery {:.2f}% / {:.2f}%", worst, 100 * e1,
                     100 * e2));
  return c;
}

// 11. Octree search, constrained plans and the decision branches.
Check planner_equivalence(const VerifyOptions&) {
  Check c;
  const KinematicChain ch = humanoid_arm();
  PrmOptions uo;
  uo.budget = 1500;
  uo.seed = 21;
  const Roadmap free_rm = prm_learn(ch, uo);
  PrmOptions co = uo;
  co.goal = end_effector(ch, ch.home);
  const Roadmap task = prm_learn(ch, co);
  const Vec3 goal = *co.goal;

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1, 1);
  int mismatches = 0;
  for (const Roadmap* rm : {&free_rm, &task}) {
    for (int k = 0; k < 50; ++k) {
      const ObjectSweep o{Vec3(u(rng), u(rng), 0.5 + u(rng)), Vec3(u(rng), u(rng), u(rng)),
                          0.02 + 0.1 * (u(rng) + 1), 0.5 + (u(rng) + 1)};
      if (search_intersections(*rm, o) != brute_force_intersections(*rm, o)) ++mismatches;
    }
  }
  c.require(mismatches == 0, fmt::format("{} of 100 searches differ from brute force", mismatches));

  auto dot_at = [](const Vec3& x) { return ObjectSweep{x, Vec3(0, 0, 1e-3), 0.01, 1.0}; };
  auto blocks_now = [&](const VecX& q, const ObjectSweep& o) {
    for (const Capsule& cap : fk_capsules(ch, q)) {
      if (capsule_hits(cap, o)) return true;
    }
    return false;
  };
  auto free_spot = [&](const Roadmap& rm, int link, const VecX& q,
                       bool avoid_constrained) -> std::optional<ObjectSweep> {
    for (const Capsule& cap : rm.capsules()) {
      if (cap.link != link) continue;
      const ObjectSweep o = dot_at(0.5 * (cap.from + cap.to));
      if (blocks_now(q, o)) continue;
      if (avoid_constrained) {
        const LinkSets s = search_intersections(task, o);
        if (std::any_of(s.begin(), s.end(), [](const auto& v) { return !v.empty(); })) continue;
      }
      return o;
    }
    return std::nullopt;
  };
  auto drift = [&](const std::vector<VecX>& path) {
    double worst = 0;
    for (std::size_t i = 0; i < path.size(); ++i) {
      worst = std::max(worst, (end_effector(ch, path[i]) - goal).norm());
      if (i == 0) continue;
      for (int s = 1; s < 10; ++s) {
        const VecX x = path[i - 1] + (path[i] - path[i - 1]) * (s / 10.0);
        worst = std::max(worst, (end_effector(ch, x) - goal).norm());
      }
    }
    return worst;
  };

  const VecX home = ch.home;
  std::vector<std::string> seen;
  auto expect = [&](const Decision& d, DecisionBranch want, const std::string& label) {
    c.require(d.branch == want, fmt::format("{}: got {}", label, to_string(d.branch)));
    if (d.branch == want) seen.push_back(to_string(want));
  };

  const Capsule arm = fk_capsules(ch, home)[2];
  expect(decide_and_plan(task, free_rm, home, AgentMode::kIdle, nullptr,
                         dot_at(0.5 * (arm.from + arm.to))),
         DecisionBranch::kStay, "stay");

  const std::optional<ObjectSweep> spot = free_spot(task, 2, home, false);
  c.require(spot.has_value(), "no constrained target");
  if (!spot) return c;
  const Decision first = decide_and_plan(task, free_rm, home, AgentMode::kIdle, nullptr, *spot);
  expect(first, DecisionBranch::kConstrained, "constrained");
  if (!first.plan) return c;
  const double ee = drift(first.plan->path);
  c.require(ee < 0.01, fmt::format("constrained plan end-effector drift {:.4f} m", ee));

  expect(decide_and_plan(task, free_rm, home, AgentMode::kIntervention, &*first.plan, *spot),
         DecisionBranch::kReusePlan, "reuse plan");

  const Capsule dest = fk_capsules(ch, first.plan->destination)[first.link];
  std::optional<ObjectSweep> moved;
  for (const Capsule& cap : task.capsules()) {
    if (cap.link != first.link) continue;
    const ObjectSweep o = dot_at(0.5 * (cap.from + cap.to));
    if (!capsule_hits(dest, o) && !blocks_now(home, o)) {
      moved = o;
      break;
    }
  }
  c.require(moved.has_value(), "no relink target");
  if (moved) {
    expect(decide_and_plan(task, free_rm, home, AgentMode::kIntervention, &*first.plan, *moved),
           DecisionBranch::kReuseLink, "reuse link");
  }

  std::optional<ObjectSweep> far;
  for (int l = 0; l < ch.num_links() && !far; ++l) far = free_spot(free_rm, l, home, true);
  c.require(far.has_value(), "no fallback target");
  if (far) {
    expect(decide_and_plan(task, free_rm, home, AgentMode::kIdle, nullptr, *far),
           DecisionBranch::kUnconstrainedFallback, "fallback");
  }

  VecX off;
  for (const VecX& q : free_rm.nodes()) {
    if ((end_effector(ch, q) - goal).norm() > 0.1) {
      off = q;
      break;
    }
  }
  const std::optional<ObjectSweep> target =
      off.size() == ch.dofs() ? free_spot(free_rm, 3, off, false) : std::nullopt;
  c.require(target.has_value(), "no violated-task target");
  if (target) {
    expect(decide_and_plan(task, free_rm, off, AgentMode::kIdle, nullptr, *target),
           DecisionBranch::kViolatedTask, "violated task");
  }

  expect(decide_and_plan(task, free_rm, home, AgentMode::kIdle, nullptr,
                         {Vec3(5, 5, 5), Vec3(1, 0, 0), 0.05, 1.0}),
         DecisionBranch::kFail, "fail");
  c.require(seen.size() == 7, fmt::format("{} of 7 branches reproduced", seen.size()));
  c.note(fmt::format("searches match; plan drift {:.2g} m; {} branches", ee, seen.size()));
  return c;
}

std::vector<AgentMode> run_trace(const std::vector<FsmInput>& trace) {
  AgentState s;
  std::vector<AgentMode> seq{s.mode};
  for (const FsmInput& in : trace) {
    s = fsm_step(s, in, {});
    if (s.mode != seq.back()) seq.push_back(s.mode);
  }
  return seq;
}

std::string joined(const std::vector<AgentMode>& seq) {
  std::string out;
  for (AgentMode m : seq) out += (out.empty() ? "" : ">") + to_string(m);
  return out;
}

// 12. Scripted FSM traces.
Check fsm_trace(const VerifyOptions&) {
  Check c;
  std::vector<FsmInput> trace;
  for (int k = 0; k < 200; ++k) {
    const double p = (k >= 10 && k < 40) ? 0.8 : 0.1;
    const double dot = k < 60 ? -0.5 : 0.5;
    trace.push_back({0.033 * k, {p}, {dot}, k > 150});
  }
  const std::vector<AgentMode> want{AgentMode::kIdle, AgentMode::kIntervention,
                                    AgentMode::kCaution, AgentMode::kReturn, AgentMode::kIdle};
  const std::vector<AgentMode> got = run_trace(trace);
  c.require(got == want, "cycle trace " + joined(got));

  const std::vector<FsmInput> reentry{{0.0, {0.9}, {-1.0}, false},
                                      {0.1, {0.1}, {-1.0}, false},
                                      {0.2, {0.1}, {1.0}, false},
                                      {0.3, {0.7}, {1.0}, false}};
  const std::vector<AgentMode> want2{AgentMode::kIdle, AgentMode::kIntervention,
                                     AgentMode::kCaution, AgentMode::kIntervention};
  const std::vector<AgentMode> got2 = run_trace(reentry);
  c.require(got2 == want2, "re-entry trace " + joined(got2));
  c.note(joined(got) + ", " + joined(got2));
  return c;
}

// 13. Wall following with a noisy slope estimate.
Check wall_following(const VerifyOptions& opt) {
  const Scenario s = scenario_from(R"(
name = wall-following
sim.duration = 20
plan.kind = circle
plan.center = 0,0
plan.radius = 1
plan.speed = 0.2
base.pose = 1,0,0
wall.enabled = true
wall.slope = 1
wall.point = 0,0.8485
wall.noise = 0.001
)",
                                   opt);
  const SimResult r = run_scenario(s);
  const SimSummary& m = r.summary;
  Check c;
  c.require(m.wall_contact_steps > 0, "never reached the wall");
  c.require(m.max_wall_normal_velocity < 1e-6,
            fmt::format("normal velocity {:.3g} m/s", m.max_wall_normal_velocity));
  const bool fitted = m.wall_fit && !m.wall_fit->vertical;
  c.require(fitted, "no wall fit");
  const double err = fitted ? std::abs(m.wall_fit->slope - 1.0) : INFINITY;
  c.require(err <= 0.02, fmt::format("slope error {:.4f}", err));
  c.note(fmt::format("{} contact steps, max normal velocity {:.2g} m/s, slope {:.4f}",
                     m.wall_contact_steps, m.max_wall_normal_velocity,
                     fitted ? m.wall_fit->slope : NAN));
  return c;
}

// Without contact the nominal torque reproduces the applied torque, given the
// estimator's roller friction matches the plant's.
Check roller_friction(const VerifyOptions& opt) {
  const Scenario s = scenario_from("name = roller-friction\n", opt);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const BaseState st = random_state(rng, s.base);
    const Vec3 t(g(rng), g(rng), g(rng));
    const DynamicsSolution d = forward_dynamics(s.base, s.friction, {}, st, t);
    const Vec3 tn = nominal_torque(s.base, s.estimator_friction, st, d.qdd.head<3>(),
                                   d.qdd.segment<3>(3), d.qdd.tail<3>());
    worst = std::max(worst, (tn - t).norm());
  }
  Check c;
  c.require(worst < 1e-8, fmt::format("contact-free torque residual {:.3g} N*m", worst));
  c.note(fmt::format("contact-free torque residual {:.2g} N*m", worst));
  return c;
}

struct Criterion {
  std::string id;
  std::string name;
  double budget;
  bool full_only;
  std::function<Check(const VerifyOptions&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> c = {
      {"1", "gravity hold", 5, false, gravity_hold},
      {"2", "escape geometry", 5, false, escape_geometry},
      {"3", "wrench round trip", 20, false, wrench_round_trip},
      {"4", "detection latency", 5, false, detection_latency},
      {"5", "smith predictor", 1, false, smith_predictor},
      {"6", "spring outer loop", 5, false, spring_loop},
      {"7", "collision probability", 60, true, collision_probability},
      {"8", "cumulative probability", 10, false, cumulative_probability},
      {"9", "appendix identities", 10, false, appendix_identities},
      {"10", "multicontact estimator", 5, false, multicontact},
      {"11", "planner equivalence", 30, false, planner_equivalence},
      {"12", "fsm trace", 1, false, fsm_trace},
      {"13", "wall following", 10, false, wall_following},
      {"roller-friction", "roller friction model", 1, false, roller_friction},
  };
  return c;
}

}  // namespace

Tier parse_tier(const std::string& s) {
  if (s == "fast") return Tier::kFast;
  if (s == "full") return Tier::kFull;
  throw InputError("tier must be fast or full");
}

std::string to_string(Tier t) { return t == Tier::kFast ? "fast" : "full"; }

bool VerifyReport::all_pass() const {
  return std::all_of(results.begin(), results.end(),
                     [](const CriterionResult& r) { return r.pass || r.skipped; });
}

const std::vector<std::string>& known_faults() {
  static const std::vector<std::string> f{"roller-friction"};
  return f;
}

VerifyReport verify_suite(const VerifyOptions& opt) {
  for (const std::string& f : opt.faults) {
    if (std::find(known_faults().begin(), known_faults().end(), f) == known_faults().end()) {
      throw InputError("unknown fault '" + f + "'");
    }
  }
  VerifyReport rep;
  rep.tier = opt.tier;
  using Clock = std::chrono::steady_clock;
  for (const Criterion& cr : criteria()) {
    CriterionResult r{cr.id, cr.name, false, false, "", 0.0, cr.budget};
    if (cr.full_only && opt.tier == Tier::kFast) {
      r.skipped = true;
      r.detail = "full tier only";
      rep.results.push_back(r);
      continue;
    }
    const auto t0 = Clock::now();
    Check c;
    try {
      c = cr.run(opt);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.pass = c.pass;
    r.detail = c.detail;
    if (r.seconds > r.budget) {
      r.pass = false;
      r.detail += fmt::format("; runtime {:.2f} s over the {:.0f} s budget", r.seconds, r.budget);
    }
    rep.results.push_back(r);
  }
  return rep;
}

std::string report_line(const CriterionResult& r) {
  const char* status = r.skipped ? "SKIP" : r.pass ? "PASS" : "FAIL";
  return fmt::format("[{}] {:>15} {:<24} {:6.2f} s  {}", status, r.id, r.name, r.seconds,
                     r.detail);
}

void write_report_json(std::ostream& os, const VerifyReport& rep) {
  nlohmann::ordered_json j;
  j["tier"] = to_string(rep.tier);
  j["pass"] = rep.all_pass();
  j["criteria"] = nlohmann::json::array();
  for (const CriterionResult& r : rep.results) {
    j["criteria"].push_back({{"id", r.id},
                             {"name", r.name},
                             {"status", r.skipped ? "skip" : r.pass ? "pass" : "fail"},
                             {"seconds", r.seconds},
                             {"budget", r.budget},
                             {"detail", r.detail}});
  }
  os << j.dump(2) << '\n';
}

}  // namespace omnisafe
