#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "omnisafe/linalg.hpp"
#include "omnisafe/rng.hpp"

namespace omnisafe {

// Diagonal noise levels for the constant-velocity object model. Vectors hold
// one entry per spatial dimension.
struct NoiseParams {
  double dt = 0.033;
  VecX sigma_d;  // velocity disturbance acting on position (m^2)
  VecX sigma_a;  // acceleration input ((m/s^2)^2)
  VecX sigma_s;  // position measurement (m^2)

  // Tracking parameters used for the ball experiments.
  static NoiseParams table(int dim);
  static NoiseParams noiseless(int dim, double dt = 0.033);
  int dim() const { return static_cast<int>(sigma_d.size()); }
  void validate() const;
};

// Position-velocity Gaussian; mean = (p, v).
struct GaussianBelief {
  VecX mean;
  MatX cov;

  int dim() const { return static_cast<int>(mean.size()) / 2; }
  VecX position() const { return mean.head(dim()); }
  VecX velocity() const { return mean.tail(dim()); }
  MatX position_cov() const { return cov.topLeftCorner(dim(), dim()); }
  void validate() const;
};

MatX transition_matrix(int dim, double dt);
MatX process_noise(const NoiseParams& n);

// Belief for a first measurement: position from y, velocity unknown.
GaussianBelief kf_init(const VecX& y, const NoiseParams& n,
                       double velocity_var = 1.0);
GaussianBelief kf_step(const GaussianBelief& b, const VecX& y,
                       const NoiseParams& n);
GaussianBelief kf_predict(const GaussianBelief& b, const NoiseParams& n);
GaussianBelief propagate(const GaussianBelief& b, int steps,
                         const NoiseParams& n);

// Steady-state predicted covariance of the filter by Riccati iteration.
MatX riccati_fixed_point(const NoiseParams& n, int max_iter = 100000);

// P(|x| <= omega) for x ~ N(m, S), m and S of dimension 1..3.
double ball_probability(const VecX& m, const MatX& S, double omega);

// Gaussian mass of [a, b] under N(m, sigma^2); sigma may be zero.
double interval_probability(double m, double sigma, double a, double b);

// Closed 1-D form in terms of erf, two branches by |dmu| vs omega.
double closed_form_1d(double dmu, double var, double omega);

double instantaneous_cp(const VecX& mu_i, const MatX& S_i, const VecX& mu_j,
                        const MatX& S_j, double omega);

// Second moment of a uniform ball of radius omega, per axis.
double ball_second_moment(int dim, double omega);

struct FreeMoments {
  GaussianBelief belief;
  bool saturated = false;  // p_ic numerically 1; conditioning undefined
};

// Moment-matched Gaussian for object i given it has not collided with j.
FreeMoments free_conditional_moments(const GaussianBelief& bi,
                                     const VecX& mu_j, const MatX& S_j,
                                     double omega, double p_ic);

struct PairRisk {
  int i = 0;
  int j = 1;
  double omega = 0.0;
  std::vector<double> p_ic;
  std::vector<double> p_ac;
  std::vector<VecX> free_mean_i;
  std::optional<int> k_c;  // first step with p_ac >= eta
};

struct PredictionConfig {
  double eta = 0.5;
  double t_threshold = 4.0;
  double horizon_time = 5.0;
  double dt = 0.033;
  int mc_samples = 100000;

  int horizon_steps() const;
  int threshold_step() const;
  void validate() const;
};

PairRisk cumulative_cp(const GaussianBelief& bi, const GaussianBelief& bj,
                       double omega, const NoiseParams& ni,
                       const NoiseParams& nj, int horizon, double eta = 0.5);

// Accumulated collision probability by sampled rollouts.
std::vector<double> monte_carlo_accumulated(const GaussianBelief& bi,
                                            const GaussianBelief& bj,
                                            double omega, const NoiseParams& ni,
                                            const NoiseParams& nj, int horizon,
                                            int samples, Engine& rng);

std::optional<int> imminent_time(const std::vector<PairRisk>& risks, double eta,
                                 std::optional<int> max_step = {});

// Time of closest approach; none when the pair is not closing.
std::optional<double> closest_approach(const VecX& p_i, const VecX& v_i,
                                       const VecX& p_j, const VecX& v_j);

struct ObjectState {
  VecX p;
  VecX v;
};

std::pair<int, int> select_imminent_pair(
    const std::vector<std::pair<int, int>>& candidates,
    const std::vector<ObjectState>& objects);

// Columns: step,pair,p_ic,p_ac,k_c
void write_risk_csv(std::ostream& os, const std::vector<PairRisk>& risks);
std::string risk_csv_row(int step, const PairRisk& r);

}  // namespace omnisafe
