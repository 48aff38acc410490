#include "omnisafe/wbosc.hpp"

namespace omnisafe {

void ConstrainedSystem::validate() const {
  const auto n = A.rows();
  if (A.cols() != n || n == 0) throw InputError("wbosc: A must be square");
  if ((A - A.transpose()).cwiseAbs().maxCoeff() >
      1e-9 * std::max(1.0, A.cwiseAbs().maxCoeff())) {
    throw InputError("wbosc: A must be symmetric");
  }
  Eigen::LLT<MatX> llt(A);
  if (llt.info() != Eigen::Success) {
    throw InputError("wbosc: A must be positive definite");
  }
  if (Jc.size() > 0 && Jc.cols() != n) {
    throw InputError("wbosc: Jc column count mismatch");
  }
  if (U.cols() != n) throw InputError("wbosc: U column count mismatch");
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    const double s = U.row(i).cwiseAbs().sum();
    if (std::abs(s - 1.0) > 1e-12 || std::abs(U.row(i).maxCoeff() - 1.0) > 1e-12) {
      throw InputError("wbosc: U rows must be identity rows");
    }
  }
}

ConstraintOps constraint_operators(const ConstrainedSystem& sys,
                                   double cutoff) {
  const auto n = sys.A.rows();
  ConstraintOps c;
  c.Ainv = sys.A.llt().solve(MatX::Identity(n, n));
  if (sys.Jc.rows() == 0) {
    c.Lambda_c = MatX(0, 0);
    c.Jc_bar = MatX(n, 0);
    c.Nc = MatX::Identity(n, n);
    return c;
  }
  const PinvResult lc = pinv_rank(sys.Jc * c.Ainv * sys.Jc.transpose(), cutoff);
  c.Lambda_c = lc.pinv;
  c.constraint_rank = lc.rank;
  c.Jc_bar = c.Ainv * sys.Jc.transpose() * c.Lambda_c;
  c.Nc = MatX::Identity(n, n) - c.Jc_bar * sys.Jc;
  return c;
}

TaskOps task_operators(const ConstrainedSystem& sys, const ConstraintOps& c,
                       const TaskSpec& task, double cutoff) {
  TaskOps t;
  t.J_ts = task.J * c.Nc;
  const PinvResult ls =
      pinv_rank(t.J_ts * c.Ainv * t.J_ts.transpose(), cutoff);
  t.Lambda_star = ls.pinv;
  t.rank_deficient = !ls.full_rank || ls.rank < task.J.rows();
  const MatX unc = sys.U * c.Nc;
  t.UNc_bar = c.Ainv * unc.transpose() *
              pinv(unc * c.Ainv * unc.transpose(), cutoff);
  t.J_star = t.J_ts * t.UNc_bar;
  t.unc_residual = max_abs(t.UNc_bar * unc - c.Nc);
  return t;
}

VecX osc_force(const ConstrainedSystem& sys, const ConstraintOps& c,
               const TaskOps& t, const TaskSpec& task, const VecX& bias,
               const VecX& jc_dot_qdot, const VecX& j_dot_qdot) {
  (void)sys;
  VecX acc = task.xdd_des;
  if (bias.size() > 0) acc += task.J * (c.Ainv * (c.Nc.transpose() * bias));
  if (jc_dot_qdot.size() > 0 && c.Jc_bar.cols() > 0) {
    acc += task.J * (c.Jc_bar * jc_dot_qdot);
  }
  if (j_dot_qdot.size() > 0) acc -= j_dot_qdot;
  return t.Lambda_star * acc;
}

VecX osc_torque(const ConstrainedSystem& sys, const ConstraintOps& c,
                const TaskOps& t, const TaskSpec& task, const VecX& bias,
                const VecX& jc_dot_qdot, const VecX& j_dot_qdot) {
  return t.J_star.transpose() *
         osc_force(sys, c, t, task, bias, jc_dot_qdot, j_dot_qdot);
}

HierarchyOps hierarchy_operators(const ConstrainedSystem& sys,
                                 const ConstraintOps& c, const MatX& J1,
                                 const MatX& J2, double cutoff) {
  const auto n = sys.A.rows();
  HierarchyOps h;
  const MatX k = c.Ainv * c.Nc.transpose() * J1.transpose();
  const MatX j1nc = J1 * c.Nc;
  h.rank_j1nc = numerical_rank(j1nc, cutoff);
  h.N1 = MatX::Identity(n, n) - k * pinv(J1 * k, cutoff) * j1nc;
  h.rank_n1 = numerical_rank(h.N1, cutoff);
  h.Lambda2 = J2 * h.N1 * c.Ainv * h.N1.transpose() * J2.transpose();
  h.basis = range_basis(0.5 * (h.Lambda2 + h.Lambda2.transpose()), cutoff);
  return h;
}

ProjectedStep project_displacement(const ConstrainedSystem& sys,
                                   const ConstraintOps& c, const MatX& J1,
                                   const VecX& dq, double cutoff) {
  const auto n = sys.A.rows();
  const HierarchyOps h =
      hierarchy_operators(sys, c, J1, MatX::Identity(n, n), cutoff);
  ProjectedStep out;
  if (h.basis.cols() == 0) {
    out.delta = VecX::Zero(n);
    out.fully_constrained = true;
    return out;
  }
  out.delta = h.basis * (h.basis.transpose() * dq);
  return out;
}

MatX actuated_inverse_inertia(const ConstrainedSystem& sys,
                              const ConstraintOps& c) {
  const MatX unc = sys.U * c.Nc;
  return unc * c.Ainv * unc.transpose();
}

std::vector<MatX> prioritized_nullspaces(const MatX& phi,
                                         const std::vector<MatX>& j_star,
                                         double cutoff) {
  const auto m = phi.rows();
  std::vector<MatX> out;
  MatX n_prec = MatX::Identity(m, m);
  for (const MatX& js : j_star) {
    const MatX jp = js * n_prec;
    const MatX lam = pinv(jp * phi * jp.transpose(), cutoff);
    const MatX jbar = phi * jp.transpose() * lam;
    out.push_back(MatX::Identity(m, m) - jbar * jp);
    n_prec = n_prec * out.back();
  }
  return out;
}

}  // namespace omnisafe
