#include "omnisafe/torque_loop.hpp"

#include <algorithm>
#include <cmath>

#include "omnisafe/linalg.hpp"

namespace omnisafe {

DelayedPlant::DelayedPlant(double gain, int delay)
    : gain_(gain), delay_(delay) {
  if (delay < 0) throw InputError("plant: delay must be >= 0");
  if (!std::isfinite(gain)) throw InputError("plant: gain must be finite");
}

void DelayedPlant::reset() { hist_.clear(); }

double DelayedPlant::sense(double tau_ext) const {
  if (delay_ == 0) {
    throw InputError("plant: sense() before commit() needs delay >= 1");
  }
  const auto d = static_cast<std::size_t>(delay_);
  if (hist_.size() < d) return tau_ext;
  return gain_ * hist_[hist_.size() - d] + tau_ext;
}

void DelayedPlant::commit(double u) {
  hist_.push_back(u);
  if (hist_.size() > static_cast<std::size_t>(delay_) + 1) hist_.pop_front();
}

double DelayedPlant::step(double u, double tau_ext) {
  commit(u);
  const auto d = static_cast<std::size_t>(delay_);
  if (hist_.size() < d + 1) return tau_ext;
  return gain_ * hist_[hist_.size() - 1 - d] + tau_ext;
}

TorqueGains TorqueGains::with_default_ff(double kp, double g_hat, double ki) {
  TorqueGains g;
  g.kp = kp;
  g.ki = ki;
  g.g_hat = g_hat;
  g.kff = 1.0 / g_hat;
  return g;
}

void TorqueGains::validate() const {
  if (!(kp >= 0.0) || !(ki >= 0.0)) throw InputError("gains: need kp, ki >= 0");
  if (!(g_hat > 0.0)) throw InputError("gains: plant estimate must be > 0");
}

TorqueController::TorqueController(TorqueGains gains, LoopMode mode,
                                   int model_delay, double tau_d_max)
    : gains_(gains),
      mode_(mode),
      model_delay_(model_delay),
      integral_clamp_(10.0 * std::abs(tau_d_max)) {
  gains_.validate();
  if (model_delay < 0) throw InputError("controller: delay must be >= 0");
}

void TorqueController::reset() {
  integral_ = 0.0;
  u_hist_.clear();
}

double TorqueController::step(double tau_d, double tau_s) {
  const auto& g = gains_;
  double u = 0.0;
  switch (mode_) {
    case LoopMode::kPlainP:
      u = g.kff * tau_d + g.kp * (tau_d - tau_s);
      break;
    case LoopMode::kPI:
      integral_ = std::clamp(integral_ + (tau_d - tau_s), -integral_clamp_,
                             integral_clamp_);
      u = g.kff * tau_d + g.kp * (tau_d - tau_s) + g.ki * integral_;
      break;
    case LoopMode::kSmith: {
      // u = kff tau_d + kp (tau_d - tau_s - G u(n) + G u(n-d)), solved for u(n).
      if (model_delay_ == 0) {
        u = g.kff * tau_d + g.kp * (tau_d - tau_s);
        break;
      }
      const auto d = static_cast<std::size_t>(model_delay_);
      const double u_delayed =
          u_hist_.size() < d ? 0.0 : u_hist_[u_hist_.size() - d];
      u = ((g.kff + g.kp) * tau_d + g.kp * g.g_hat * u_delayed -
           g.kp * tau_s) /
          (1.0 + g.kp * g.g_hat);
      break;
    }
  }
  u_hist_.push_back(u);
  if (u_hist_.size() > static_cast<std::size_t>(model_delay_) + 1) {
    u_hist_.pop_front();
  }
  return u;
}

LoopSample ideal_loop_step(const TorqueGains& g, double plant_gain,
                           double tau_d, double tau_ext) {
  LoopSample s;
  s.u = ((g.kff + g.kp) * tau_d - g.kp * tau_ext) / (1.0 + g.kp * plant_gain);
  s.tau_s = plant_gain * s.u + tau_ext;
  return s;
}

LoopTrace run_loop(DelayedPlant plant, TorqueController ctrl,
                   const Signal& tau_d, const Signal& tau_ext, int n_steps) {
  LoopTrace tr;
  tr.u.reserve(n_steps);
  tr.tau_s.reserve(n_steps);
  for (int n = 0; n < n_steps; ++n) {
    const double ext = tau_ext ? tau_ext(n) : 0.0;
    const double ts = plant.sense(ext);
    const double u = ctrl.step(tau_d ? tau_d(n) : 0.0, ts);
    plant.commit(u);
    tr.u.push_back(u);
    tr.tau_s.push_back(ts);
  }
  return tr;
}

LoopTrace run_ideal_loop(const TorqueGains& gains, double plant_gain,
                         const Signal& tau_d, const Signal& tau_ext,
                         int n_steps) {
  LoopTrace tr;
  for (int n = 0; n < n_steps; ++n) {
    const LoopSample s = ideal_loop_step(gains, plant_gain,
                                         tau_d ? tau_d(n) : 0.0,
                                         tau_ext ? tau_ext(n) : 0.0);
    tr.u.push_back(s.u);
    tr.tau_s.push_back(s.tau_s);
  }
  return tr;
}

LoopTrace zero_force_mode(DelayedPlant plant, TorqueController ctrl,
                          const Signal& tau_ext, int n_steps) {
  return run_loop(std::move(plant), std::move(ctrl), Signal(), tau_ext,
                  n_steps);
}

SpringTrace spring_outer_loop(const SpringLoopConfig& cfg, DelayedPlant plant,
                              TorqueController ctrl) {
  if (!(cfg.load_inertia > 0.0) || !(cfg.dt > 0.0) || cfg.stiffness < 0.0) {
    throw InputError("spring loop: need I > 0, dt > 0, k >= 0");
  }
  SpringTrace tr;
  tr.dt = cfg.dt;
  const int n = static_cast<int>(std::lround(cfg.duration / cfg.dt));
  double theta = cfg.theta0;
  double omega = 0.0;
  for (int i = 0; i < n; ++i) {
    const double tau_d = -cfg.stiffness * theta;
    double ts = 0.0;
    if (plant.delay() == 0) {
      ts = ideal_loop_step(ctrl.gains(), plant.gain(), tau_d, 0.0).tau_s;
    } else {
      ts = plant.sense(0.0);
      plant.commit(ctrl.step(tau_d, ts));
    }
    const double dist = cfg.disturbance ? cfg.disturbance(i) : 0.0;
    omega += cfg.dt * (ts + dist) / cfg.load_inertia;
    theta += cfg.dt * omega;
    tr.theta.push_back(theta);
    tr.tau_s.push_back(ts);
  }
  return tr;
}

double spring_stiffness_for(double frequency_hz, double inertia) {
  const double w = 2.0 * kPi * frequency_hz;
  return w * w * inertia;
}

double oscillation_frequency(const std::vector<double>& x, double dt) {
  std::vector<double> crossings;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i - 1] < 0.0 && x[i] >= 0.0) {
      const double frac = -x[i - 1] / (x[i] - x[i - 1]);
      crossings.push_back((static_cast<double>(i - 1) + frac) * dt);
    }
  }
  if (crossings.size() < 2) return 0.0;
  const double span = crossings.back() - crossings.front();
  return static_cast<double>(crossings.size() - 1) / span;
}

}  // namespace omnisafe
