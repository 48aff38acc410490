#pragma once

#include <vector>

#include "omnisafe/linalg.hpp"

namespace omnisafe {

struct ConstrainedSystem {
  MatX A;   // n x n, SPD
  MatX Jc;  // k x n
  MatX U;   // m x n, rows of identity

  int dofs() const { return static_cast<int>(A.rows()); }
  void validate() const;
};

struct ConstraintOps {
  MatX Ainv;
  MatX Lambda_c;
  MatX Jc_bar;  // A^-1 Jc^T Lambda_c
  MatX Nc;
  int constraint_rank = 0;
};

ConstraintOps constraint_operators(const ConstrainedSystem& sys,
                                   double cutoff = kPinvCutoff);

struct TaskSpec {
  MatX J;
  VecX xdd_des;
  int priority = 1;
};

struct TaskOps {
  MatX J_ts;         // J Nc
  MatX Lambda_star;  // (J_ts A^-1 J_ts^T)^+
  MatX UNc_bar;      // A^-1 (U Nc)^T (U Nc A^-1 (U Nc)^T)^+
  MatX J_star;       // J_ts UNc_bar, t x m
  bool rank_deficient = false;
  // ||UNc_bar U Nc - Nc||_inf; zero when the rank conditions hold.
  double unc_residual = 0.0;
};

TaskOps task_operators(const ConstrainedSystem& sys, const ConstraintOps& c,
                       const TaskSpec& task, double cutoff = kPinvCutoff);

// Task force for a_ref with bias b (gravity plus friction), the constraint
// drift term Jc_dot qdot and the task drift J_dot qdot.
VecX osc_force(const ConstrainedSystem& sys, const ConstraintOps& c,
               const TaskOps& t, const TaskSpec& task, const VecX& bias,
               const VecX& jc_dot_qdot, const VecX& j_dot_qdot);

// Actuator torques T = J*^T F.
VecX osc_torque(const ConstrainedSystem& sys, const ConstraintOps& c,
                const TaskOps& t, const TaskSpec& task, const VecX& bias,
                const VecX& jc_dot_qdot, const VecX& j_dot_qdot);

struct HierarchyOps {
  MatX N1;
  MatX Lambda2;  // J2 N1 A^-1 N1^T J2^T
  MatX basis;    // left singular vectors of Lambda2 above the cutoff
  int rank_j1nc = 0;
  int rank_n1 = 0;
};

HierarchyOps hierarchy_operators(const ConstrainedSystem& sys,
                                 const ConstraintOps& c, const MatX& J1,
                                 const MatX& J2, double cutoff = kPinvCutoff);

struct ProjectedStep {
  VecX delta;
  bool fully_constrained = false;
};

// Projects dq onto the motion basis left free by task 1 (J2 = I).
ProjectedStep project_displacement(const ConstrainedSystem& sys,
                                   const ConstraintOps& c, const MatX& J1,
                                   const VecX& dq,
                                   double cutoff = kPinvCutoff);

// Phi* = U Nc A^-1 (U Nc)^T.
MatX actuated_inverse_inertia(const ConstrainedSystem& sys,
                              const ConstraintOps& c);

// Prioritized projections N_{i|prec(i)} in actuated space for tasks given as
// J_i* (t_i x m), highest priority first.
std::vector<MatX> prioritized_nullspaces(const MatX& phi,
                                         const std::vector<MatX>& j_star,
                                         double cutoff = kPinvCutoff);

}  // namespace omnisafe
