#include "omnisafe/prediction.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace omnisafe {

NoiseParams NoiseParams::table(int dim) {
  NoiseParams n;
  n.dt = 0.033;
  n.sigma_d = VecX::Constant(dim, 0.01);
  n.sigma_a = VecX::Constant(dim, 1.5);
  n.sigma_s = VecX::Constant(dim, 0.01);
  return n;
}

NoiseParams NoiseParams::noiseless(int dim, double dt) {
  NoiseParams n;
  n.dt = dt;
  n.sigma_d = VecX::Zero(dim);
  n.sigma_a = VecX::Zero(dim);
  n.sigma_s = VecX::Zero(dim);
  return n;
}

void NoiseParams::validate() const {
  if (!(dt > 0)) throw InputError("noise: dt must be positive");
  const int d = dim();
  if (d < 1 || d > 3 || sigma_a.size() != d || sigma_s.size() != d) {
    throw InputError("noise: dimension must be 1..3 and consistent");
  }
  if ((sigma_d.array() < 0).any() || (sigma_a.array() < 0).any() ||
      (sigma_s.array() < 0).any()) {
    throw InputError("noise: variances must be >= 0");
  }
}

void GaussianBelief::validate() const {
  const int n = static_cast<int>(mean.size());
  if (n % 2 != 0 || n < 2 || n > 6) {
    throw InputError("belief: state must be (p, v) with 1..3 dimensions");
  }
  if (cov.rows() != n || cov.cols() != n) {
    throw InputError("belief: covariance shape mismatch");
  }
  if (!mean.allFinite() || !cov.allFinite()) {
    throw InputError("belief: non-finite entries");
  }
}

MatX transition_matrix(int dim, double dt) {
  MatX a = MatX::Identity(2 * dim, 2 * dim);
  a.topRightCorner(dim, dim) = dt * MatX::Identity(dim, dim);
  return a;
}

MatX process_noise(const NoiseParams& n) {
  const int d = n.dim();
  MatX q = MatX::Zero(2 * d, 2 * d);
  q.topLeftCorner(d, d) = n.sigma_d.asDiagonal();
  q.bottomRightCorner(d, d) = (n.sigma_a * n.dt).asDiagonal();
  return q;
}

GaussianBelief kf_init(const VecX& y, const NoiseParams& n,
                       double velocity_var) {
  const int d = static_cast<int>(y.size());
  GaussianBelief b;
  b.mean = VecX::Zero(2 * d);
  b.mean.head(d) = y;
  b.cov = MatX::Zero(2 * d, 2 * d);
  b.cov.topLeftCorner(d, d) = n.sigma_s.asDiagonal();
  b.cov.bottomRightCorner(d, d) = velocity_var * MatX::Identity(d, d);
  return b;
}

GaussianBelief kf_predict(const GaussianBelief& b, const NoiseParams& n) {
  const MatX a = transition_matrix(b.dim(), n.dt);
  GaussianBelief out;
  out.mean = a * b.mean;
  out.cov = a * b.cov * a.transpose() + process_noise(n);
  out.cov = 0.5 * (out.cov + out.cov.transpose());
  return out;
}

GaussianBelief kf_step(const GaussianBelief& b, const VecX& y,
                       const NoiseParams& n) {
  b.validate();
  n.validate();
  const int d = b.dim();
  if (y.size() != d || n.dim() != d) {
    throw InputError("kf_step: measurement dimension mismatch");
  }
  const GaussianBelief pr = kf_predict(b, n);
  MatX c = MatX::Zero(d, 2 * d);
  c.leftCols(d) = MatX::Identity(d, d);
  const MatX s = c * pr.cov * c.transpose() + MatX(n.sigma_s.asDiagonal());
  const MatX k = pr.cov * c.transpose() * pinv(s);
  GaussianBelief out;
  out.mean = pr.mean + k * (y - c * pr.mean);
  out.cov = (MatX::Identity(2 * d, 2 * d) - k * c) * pr.cov;
  out.cov = 0.5 * (out.cov + out.cov.transpose());
  return out;
}

GaussianBelief propagate(const GaussianBelief& b, int steps,
                         const NoiseParams& n) {
  if (steps < 0) throw InputError("propagate: steps must be >= 0");
  GaussianBelief out = b;
  for (int k = 0; k < steps; ++k) out = kf_predict(out, n);
  return out;
}

MatX riccati_fixed_point(const NoiseParams& n, int max_iter) {
  const int d = n.dim();
  const MatX a = transition_matrix(d, n.dt);
  const MatX q = process_noise(n);
  MatX c = MatX::Zero(d, 2 * d);
  c.leftCols(d) = MatX::Identity(d, d);
  const MatX r = n.sigma_s.asDiagonal();
  MatX post = MatX::Identity(2 * d, 2 * d);
  for (int it = 0; it < max_iter; ++it) {
    const MatX pred = a * post * a.transpose() + q;
    const MatX k = pred * c.transpose() * pinv(c * pred * c.transpose() + r);
    const MatX next = (MatX::Identity(2 * d, 2 * d) - k * c) * pred;
    if (max_abs(next - post) < 1e-15 * std::max(1.0, max_abs(post))) {
      return next;
    }
    post = next;
  }
  return post;
}

double instantaneous_cp(const VecX& mu_i, const MatX& S_i, const VecX& mu_j,
                        const MatX& S_j, double omega) {
  if (mu_i.size() != mu_j.size()) {
    throw InputError("instantaneous_cp: dimension mismatch");
  }
  return ball_probability(mu_i - mu_j, S_i + S_j, omega);
}

double ball_second_moment(int dim, double omega) {
  return omega * omega / (dim + 2.0);
}

FreeMoments free_conditional_moments(const GaussianBelief& bi,
                                     const VecX& mu_j, const MatX& S_j,
                                     double omega, double p_ic) {
  const int d = bi.dim();
  FreeMoments out{bi, false};
  if (!(p_ic > 0.0)) return out;
  if (p_ic >= 1.0 - 1e-12) {
    out.saturated = true;
    return out;
  }
  // Colliding part: prior times N(p; mu_j, S_j + C_B / V_B), a Kalman-style
  // update on the full position-velocity state.
  MatX c = MatX::Zero(d, 2 * d);
  c.leftCols(d) = MatX::Identity(d, d);
  const MatX r = S_j + ball_second_moment(d, omega) * MatX::Identity(d, d);
  const MatX s = c * bi.cov * c.transpose() + r;
  const MatX k = bi.cov * c.transpose() * pinv(s);
  const VecX mu_c = bi.mean + k * (mu_j - c * bi.mean);
  const MatX cov_c = (MatX::Identity(2 * d, 2 * d) - k * c) * bi.cov;

  // Complement of the collided component, matched to first two moments.
  const double p = p_ic;
  const VecX diff = bi.mean - mu_c;
  out.belief.mean = (bi.mean - p * mu_c) / (1.0 - p);
  MatX cov = (bi.cov - p * cov_c - (p / (1.0 - p)) * diff * diff.transpose()) /
             (1.0 - p);
  cov = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<MatX> es(cov);
  const VecX ev = es.eigenvalues().cwiseMax(0.0);
  out.belief.cov = es.eigenvectors() * ev.asDiagonal() *
                   es.eigenvectors().transpose();
  return out;
}

int PredictionConfig::horizon_steps() const {
  return static_cast<int>(std::lround(horizon_time / dt));
}

int PredictionConfig::threshold_step() const {
  return static_cast<int>(std::lround(t_threshold / dt));
}

void PredictionConfig::validate() const {
  if (!(eta > 0 && eta < 1)) throw InputError("prediction: eta must be in (0, 1)");
  if (!(dt > 0)) throw InputError("prediction: dt must be positive");
  if (horizon_steps() < 1) throw InputError("prediction: horizon must be >= 1 step");
  if (!(t_threshold > 0)) throw InputError("prediction: T_th must be positive");
  if (mc_samples < 1) throw InputError("prediction: mc_samples must be >= 1");
}

PairRisk cumulative_cp(const GaussianBelief& bi, const GaussianBelief& bj,
                       double omega, const NoiseParams& ni,
                       const NoiseParams& nj, int horizon, double eta) {
  if (horizon < 1) throw InputError("cumulative_cp: horizon must be >= 1");
  if (!(omega > 0)) throw InputError("cumulative_cp: omega must be positive");
  bi.validate();
  bj.validate();
  PairRisk risk;
  risk.omega = omega;
  GaussianBelief xi = bi, xj = bj;
  double pac = 0.0;
  bool saturated = false;
  for (int k = 0; k <= horizon; ++k) {
    if (k > 0) {
      xi = kf_predict(xi, ni);
      xj = kf_predict(xj, nj);
    }
    double pic = 1.0;
    if (!saturated) {
      pic = instantaneous_cp(xi.position(), xi.position_cov(), xj.position(),
                             xj.position_cov(), omega);
      pac = k == 0 ? pic : pac + (1.0 - pac) * pic;
      pac = std::clamp(pac, risk.p_ac.empty() ? 0.0 : risk.p_ac.back(), 1.0);
    }
    risk.p_ic.push_back(pic);
    risk.p_ac.push_back(pac);
    risk.free_mean_i.push_back(xi.mean);
    if (!risk.k_c && pac >= eta) risk.k_c = k;
    if (saturated) continue;
    const FreeMoments fi = free_conditional_moments(
        xi, xj.position(), xj.position_cov(), omega, pic);
    const FreeMoments fj = free_conditional_moments(
        xj, xi.position(), xi.position_cov(), omega, pic);
    if (fi.saturated || fj.saturated || pac >= 1.0 - 1e-12) {
      saturated = true;
      pac = 1.0;
      risk.p_ac.back() = 1.0;
      if (!risk.k_c && pac >= eta) risk.k_c = k;
      continue;
    }
    xi = fi.belief;
    xj = fj.belief;
  }
  return risk;
}

std::vector<double> monte_carlo_accumulated(const GaussianBelief& bi,
                                            const GaussianBelief& bj,
                                            double omega, const NoiseParams& ni,
                                            const NoiseParams& nj, int horizon,
                                            int samples, Engine& rng) {
  const int d = bi.dim();
  const MatX a = transition_matrix(d, ni.dt);
  auto chol = [](const MatX& m) {
    Eigen::SelfAdjointEigenSolver<MatX> es(m);
    return MatX(es.eigenvectors() *
                es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal());
  };
  const MatX li = chol(bi.cov), lj = chol(bj.cov);
  const MatX qi = chol(process_noise(ni)), qj = chol(process_noise(nj));
  std::normal_distribution<double> g;
  auto draw = [&](int n) {
    VecX z(n);
    for (int t = 0; t < n; ++t) z(t) = g(rng);
    return z;
  };
  std::vector<long> first(horizon + 1, 0);
  for (int s = 0; s < samples; ++s) {
    VecX xi = bi.mean + li * draw(2 * d);
    VecX xj = bj.mean + lj * draw(2 * d);
    for (int k = 0; k <= horizon; ++k) {
      if (k > 0) {
        xi = a * xi + qi * draw(2 * d);
        xj = a * xj + qj * draw(2 * d);
      }
      if ((xi.head(d) - xj.head(d)).norm() <= omega) {
        ++first[k];
        break;
      }
    }
  }
  std::vector<double> out(horizon + 1);
  long acc = 0;
  for (int k = 0; k <= horizon; ++k) {
    acc += first[k];
    out[k] = static_cast<double>(acc) / samples;
  }
  return out;
}

std::optional<int> imminent_time(const std::vector<PairRisk>& risks, double eta,
                                 std::optional<int> max_step) {
  std::optional<int> best;
  for (const PairRisk& r : risks) {
    const int n = static_cast<int>(r.p_ac.size());
    const int last = max_step ? std::min(n - 1, *max_step) : n - 1;
    for (int k = 0; k <= last; ++k) {
      if (r.p_ac[k] >= eta) {
        if (!best || k < *best) best = k;
        break;
      }
    }
  }
  return best;
}

std::optional<double> closest_approach(const VecX& p_i, const VecX& v_i,
                                       const VecX& p_j, const VecX& v_j) {
  const VecX dp = p_i - p_j;
  const VecX dv = v_i - v_j;
  if (!dp.allFinite() || !dv.allFinite()) {
    throw InputError("closest_approach: non-finite input");
  }
  const double dot = dp.dot(dv);
  if (!(dot < 0.0)) return std::nullopt;
  return -dot / dv.squaredNorm();
}

std::pair<int, int> select_imminent_pair(
    const std::vector<std::pair<int, int>>& candidates,
    const std::vector<ObjectState>& objects) {
  if (candidates.empty()) {
    throw InputError("select_imminent_pair: candidate set is empty");
  }
  double best = std::numeric_limits<double>::infinity();
  std::pair<int, int> out = candidates.front();
  for (const auto& c : candidates) {
    const ObjectState& a = objects.at(c.first);
    const ObjectState& b = objects.at(c.second);
    const double t = closest_approach(a.p, a.v, b.p, b.v)
                         .value_or(std::numeric_limits<double>::infinity());
    if (t < best) {
      best = t;
      out = c;
    }
  }
  return out;
}

std::string risk_csv_row(int step, const PairRisk& r) {
  const int flag = r.k_c && *r.k_c == step ? 1 : 0;
  return fmt::format("{},{}-{},{},{},{}", step, r.i, r.j, r.p_ic[step],
                     r.p_ac[step], flag);
}

void write_risk_csv(std::ostream& os, const std::vector<PairRisk>& risks) {
  os << "step,pair,p_ic,p_ac,k_c\n";
  for (const PairRisk& r : risks) {
    for (int k = 0; k < static_cast<int>(r.p_ac.size()); ++k) {
      os << risk_csv_row(k, r) << '\n';
    }
  }
}

}  // namespace omnisafe
