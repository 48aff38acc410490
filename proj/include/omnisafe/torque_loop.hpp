#pragma once

#include <deque>
#include <functional>
#include <vector>

namespace omnisafe {

// tau_s(n) = G u(n - d) + tau_ext(n).
class DelayedPlant {
 public:
  DelayedPlant(double gain, int delay);

  // Sensed torque for the current step from the command issued d steps ago.
  // Requires delay >= 1 (the command for this step is not yet known).
  double sense(double tau_ext) const;
  // Appends u(n) to the command history.
  void commit(double u);
  // commit(u) then sense(tau_ext); allowed for any delay including 0.
  double step(double u, double tau_ext);

  double gain() const { return gain_; }
  int delay() const { return delay_; }
  void reset();

 private:
  double gain_;
  int delay_;
  std::deque<double> hist_;  // at most delay + 1 newest commands
};

enum class LoopMode { kPlainP, kPI, kSmith };

struct TorqueGains {
  double kp = 0.0;
  double ki = 0.0;
  double kff = 1.0;
  double g_hat = 1.0;

  static TorqueGains with_default_ff(double kp, double g_hat, double ki = 0.0);
  void validate() const;
};

class TorqueController {
 public:
  // model_delay is the predictor's d; tau_d_max sets the anti-windup clamp.
  TorqueController(TorqueGains gains, LoopMode mode, int model_delay = 0,
                   double tau_d_max = 1.0);

  double step(double tau_d, double tau_s);
  void reset();

  const TorqueGains& gains() const { return gains_; }
  LoopMode mode() const { return mode_; }
  double integral() const { return integral_; }

 private:
  TorqueGains gains_;
  LoopMode mode_;
  int model_delay_;
  double integral_clamp_;
  double integral_ = 0.0;
  std::deque<double> u_hist_;
};

struct LoopSample {
  double u = 0.0;
  double tau_s = 0.0;
};

// Delay-free proportional loop solved at each step (algebraic loop).
LoopSample ideal_loop_step(const TorqueGains& gains, double plant_gain,
                           double tau_d, double tau_ext);

using Signal = std::function<double(int)>;

struct LoopTrace {
  std::vector<double> u;
  std::vector<double> tau_s;
};

// Closed loop over n_steps with the plant delay >= 1.
LoopTrace run_loop(DelayedPlant plant, TorqueController ctrl,
                   const Signal& tau_d, const Signal& tau_ext, int n_steps);
LoopTrace run_ideal_loop(const TorqueGains& gains, double plant_gain,
                         const Signal& tau_d, const Signal& tau_ext,
                         int n_steps);

// tau_d = 0 closed loop.
LoopTrace zero_force_mode(DelayedPlant plant, TorqueController ctrl,
                          const Signal& tau_ext, int n_steps);

struct SpringLoopConfig {
  double stiffness = 4.48;
  double load_inertia = 0.71;
  double dt = 1e-3;
  double theta0 = 0.1;
  double duration = 20.0;
  Signal disturbance;  // external torque on the load, optional
};

struct SpringTrace {
  double dt = 0.0;
  std::vector<double> theta;
  std::vector<double> tau_s;
};

// tau_d = -k theta through the inner torque loop; I theta_dd = tau_s.
SpringTrace spring_outer_loop(const SpringLoopConfig& cfg, DelayedPlant plant,
                              TorqueController ctrl);

double spring_stiffness_for(double frequency_hz, double inertia);
// Mean frequency from upward zero crossings; 0 when fewer than two.
double oscillation_frequency(const std::vector<double>& x, double dt);

}  // namespace omnisafe
