#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace omnisafe {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

// Relative singular-value cutoff shared by every pseudoinverse and rank test.
inline constexpr double kPinvCutoff = 1e-10;

class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PinvResult {
  MatX pinv;
  int rank = 0;
  bool full_rank = false;
};

// Singular values at or below cutoff * sigma_max count as zero.
PinvResult pinv_rank(const MatX& m, double cutoff = kPinvCutoff);

inline MatX pinv(const MatX& m, double cutoff = kPinvCutoff) {
  return pinv_rank(m, cutoff).pinv;
}

int numerical_rank(const MatX& m, double cutoff = kPinvCutoff);

// Orthonormal basis of the range of m (left singular vectors above cutoff).
MatX range_basis(const MatX& m, double cutoff = kPinvCutoff);

double max_abs(const MatX& m);

}  // namespace omnisafe
