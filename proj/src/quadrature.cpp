#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>

#include "omnisafe/prediction.hpp"

namespace omnisafe {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kTailSigmas = 9.0;

struct BallIntegrand {
  VecX m;      // means in the covariance eigenbasis
  VecX sigma;  // per-axis standard deviations
  int dim;

  double level(int k, double r2) const {
    if (r2 < 0.0) return 0.0;
    const double r = std::sqrt(r2);
    if (k == dim - 1) return interval_probability(m(k), sigma(k), -r, r);
    const double s = sigma(k);
    if (s <= 1e-14 * (r + std::abs(m(k)) + 1e-300)) {
      const double z = m(k);
      return z * z <= r2 ? level(k + 1, r2 - z * z) : 0.0;
    }
    const double za = std::max(-r, m(k) - kTailSigmas * s);
    const double zb = std::min(r, m(k) + kTailSigmas * s);
    if (!(za < zb)) return 0.0;
    auto pdf = [&](double z) {
      const double u = (z - m(k)) / s;
      return kInvSqrt2Pi / s * std::exp(-0.5 * u * u);
    };
    // Affine maps onto [-1, 1]: narrow raw intervals defeat the adaptive
    // error estimate.
    auto integrate = [](auto&& f) {
      return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          f, -1.0, 1.0, 12, 1e-11);
    };
    if (za > -r && zb < r) {
      const double mid = 0.5 * (za + zb), half = 0.5 * (zb - za);
      return integrate([&](double t) {
        const double z = mid + half * t;
        return half * pdf(z) * level(k + 1, r2 - z * z);
      });
    }
    // z = r sin(phi) removes the square-root edge of the ball.
    const double pa = std::asin(std::clamp(za / r, -1.0, 1.0));
    const double pb = std::asin(std::clamp(zb / r, -1.0, 1.0));
    const double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
    return integrate([&](double t) {
      const double phi = mid + half * t;
      const double c = r * std::cos(phi);
      return half * c * pdf(r * std::sin(phi)) * level(k + 1, c * c);
    });
  }
};

}  // namespace

double interval_probability(double m, double sigma, double a, double b) {
  if (!(a < b)) return 0.0;
  if (sigma <= 0.0) return (m >= a && m <= b) ? 1.0 : 0.0;
  const double ua = (a - m) / (sigma * kSqrt2);
  const double ub = (b - m) / (sigma * kSqrt2);
  // erfc keeps precision in whichever tail holds the interval.
  if (ua > 0.0) return 0.5 * (std::erfc(ua) - std::erfc(ub));
  if (ub < 0.0) return 0.5 * (std::erfc(-ub) - std::erfc(-ua));
  return 1.0 - 0.5 * (std::erfc(-ua) + std::erfc(ub));
}

double closed_form_1d(double dmu, double var, double omega) {
  if (!(omega > 0)) throw InputError("closed_form_1d: omega must be positive");
  if (!(var >= 0)) throw InputError("closed_form_1d: negative variance");
  const double d = std::abs(dmu);
  if (var == 0.0) return d <= omega ? 1.0 : 0.0;
  const double s = std::sqrt(2.0 * var);
  const double xp = (d + omega) / s;
  const double xm = (d - omega) / s;
  if (d > omega) return 0.5 * (std::erf(xp) - std::erf(xm));
  return 0.5 * (std::erf(xp) + std::erf(-xm));
}

double ball_probability(const VecX& m, const MatX& S, double omega) {
  const int d = static_cast<int>(m.size());
  if (d < 1 || d > 3) throw InputError("ball_probability: dimension must be 1..3");
  if (S.rows() != d || S.cols() != d) {
    throw InputError("ball_probability: covariance shape mismatch");
  }
  if (!(omega > 0)) throw InputError("ball_probability: omega must be positive");
  const double scale = std::max(1.0, max_abs(S));
  if (max_abs(S - S.transpose()) > 1e-9 * scale) {
    throw InputError("ball_probability: covariance not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (S + S.transpose()));
  if (es.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw InputError("ball_probability: covariance not positive semidefinite");
  }
  BallIntegrand in;
  in.dim = d;
  in.m = es.eigenvectors().transpose() * m;
  in.sigma = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const double p = in.level(0, omega * omega);
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace omnisafe
