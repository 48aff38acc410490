#include "omnisafe/linalg.hpp"

#include <Eigen/SVD>

namespace omnisafe {

namespace {

int count_above(const VecX& sv, double cutoff) {
  if (sv.size() == 0) return 0;
  const double smax = sv(0);
  if (!(smax > 0.0)) return 0;
  const double tol = cutoff * smax;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) ++r;
  }
  return r;
}

}  // namespace

PinvResult pinv_rank(const MatX& m, double cutoff) {
  PinvResult out;
  out.pinv = MatX::Zero(m.cols(), m.rows());
  if (m.size() == 0) return out;
  Eigen::JacobiSVD<MatX> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VecX& sv = svd.singularValues();
  out.rank = count_above(sv, cutoff);
  for (int i = 0; i < out.rank; ++i) {
    out.pinv.noalias() +=
        svd.matrixV().col(i) * (svd.matrixU().col(i).transpose() / sv(i));
  }
  out.full_rank = out.rank == std::min(m.rows(), m.cols());
  return out;
}

int numerical_rank(const MatX& m, double cutoff) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<MatX> svd(m);
  return count_above(svd.singularValues(), cutoff);
}

MatX range_basis(const MatX& m, double cutoff) {
  if (m.size() == 0) return MatX(m.rows(), 0);
  Eigen::JacobiSVD<MatX> svd(m, Eigen::ComputeThinU);
  const int r = count_above(svd.singularValues(), cutoff);
  return svd.matrixU().leftCols(r);
}

double max_abs(const MatX& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace omnisafe
