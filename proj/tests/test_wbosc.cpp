#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "omnisafe/base_model.hpp"
#include "omnisafe/wbosc.hpp"

namespace omnisafe {
namespace {

MatX random_spd(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  MatX b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = g(rng);
  return b * b.transpose() + n * MatX::Identity(n, n);
}

MatX random_mat(std::mt19937_64& rng, int r, int c) {
  std::normal_distribution<double> g;
  MatX m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
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

TEST(ConstraintOps, UnconstrainedAndFullyConstrained) {
  ConstrainedSystem s{MatX::Identity(4, 4), MatX::Zero(2, 4),
                      MatX::Identity(4, 4)};
  ConstraintOps c = constraint_operators(s);
  EXPECT_LT((c.Nc - MatX::Identity(4, 4)).norm(), 1e-15);
  EXPECT_LT(c.Lambda_c.norm(), 1e-15);
  s.Jc = MatX::Identity(4, 4);
  c = constraint_operators(s);
  EXPECT_LT(c.Nc.norm(), 1e-12);
}

TEST(ConstraintOps, RandomIdentities) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const ConstrainedSystem s = random_system(rng, 7, 3, 4);
    const ConstraintOps c = constraint_operators(s);
    EXPECT_LT(max_abs(c.Nc * c.Nc - c.Nc), 1e-10);
    EXPECT_LT(max_abs(s.Jc * c.Nc), 1e-10);
    EXPECT_LT(max_abs(c.Jc_bar * s.Jc * c.Jc_bar - c.Jc_bar), 1e-10);
    EXPECT_LT(max_abs(c.Lambda_c - c.Lambda_c.transpose()), 1e-10);
  }
}

TEST(ConstraintOps, RankDeficientConstraintsUsePseudoinverse) {
  std::mt19937_64 rng(2);
  ConstrainedSystem s = random_system(rng, 6, 3, 6);
  s.Jc.row(2) = s.Jc.row(0) + s.Jc.row(1);
  const ConstraintOps c = constraint_operators(s);
  EXPECT_EQ(c.constraint_rank, 2);
  EXPECT_LT(max_abs(c.Nc * c.Nc - c.Nc), 1e-10);
  EXPECT_LT(max_abs(s.Jc * c.Nc), 1e-10);
}

TEST(TaskOps, UnconstrainedIdentityTaskGivesMassMatrix) {
  std::mt19937_64 rng(3);
  const MatX a = random_spd(rng, 5);
  const ConstrainedSystem s{a, MatX(0, 5), MatX::Identity(5, 5)};
  const ConstraintOps c = constraint_operators(s);
  const TaskOps t = task_operators(s, c, {MatX::Identity(5, 5), VecX()});
  EXPECT_LT(max_abs(t.Lambda_star - a), 1e-9);
  EXPECT_FALSE(t.rank_deficient);
}

TEST(TaskOps, HomogeneousInMass) {
  std::mt19937_64 rng(4);
  ConstrainedSystem s = random_system(rng, 7, 2, 5);
  const TaskSpec task{random_mat(rng, 3, 7), VecX()};
  const TaskOps t1 = task_operators(s, constraint_operators(s), task);
  s.A *= 2.0;
  const TaskOps t2 = task_operators(s, constraint_operators(s), task);
  EXPECT_LT(max_abs(t2.Lambda_star - 2.0 * t1.Lambda_star),
            1e-9 * max_abs(t1.Lambda_star));
}

ConstrainedSystem base_system(const BaseParams& p, double theta) {
  return {mass_matrix(p), base_jacobians(p, theta).Jc, actuation_selector()};
}

MatX body_task() {
  MatX j = MatX::Zero(3, 9);
  j.leftCols(3) = MatX::Identity(3, 3);
  return j;
}

TEST(TaskOps, BaseEffectiveMassEqualsReducedMass) {
  const BaseParams p;
  for (double th : {0.0, 0.4, 1.3, -2.2}) {
    const ConstrainedSystem s = base_system(p, th);
    const TaskOps t = task_operators(s, constraint_operators(s), {body_task(), VecX()});
    const BaseJacobians j = base_jacobians(p, th);
    const Mat3 mred = Vec3(p.mass, p.mass, p.body_inertia).asDiagonal().toDenseMatrix() +
                      p.wheel_inertia * j.Jcw.transpose() * j.Jcw +
                      p.roller_inertia * j.Jcr.transpose() * j.Jcr;
    EXPECT_LT(max_abs(t.Lambda_star - mred), 1e-8);
    EXPECT_LT(t.unc_residual, 1e-9);
  }
}

TEST(OscTorque, FlatRestZeroCommandGivesZeroTorque) {
  const BaseParams p;
  const ConstrainedSystem s = base_system(p, 0.3);
  const ConstraintOps c = constraint_operators(s);
  const TaskSpec task{body_task(), Vec3::Zero()};
  const TaskOps t = task_operators(s, c, task);
  const VecX tq = osc_torque(s, c, t, task, Vec9::Zero(), Vec6::Zero(), VecX());
  EXPECT_LT(tq.norm(), 1e-14);
}

TEST(OscTorque, RealizesCommandedBodyAcceleration) {
  const BaseParams p;
  RollerFrictionParams f;
  const SlopeSpec slope = SlopeSpec::incline(0.17, 0.8);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 40; ++k) {
    const BaseState st = consistent_state(
        p, Vec3(u(rng), u(rng), 3 * u(rng)), Vec3(u(rng), u(rng), u(rng)));
    const ConstrainedSystem s = base_system(p, st.pose(2));
    const ConstraintOps c = constraint_operators(s);
    const TaskSpec task{body_task(), Vec3(u(rng), u(rng), u(rng))};
    const TaskOps t = task_operators(s, c, task);
    const Vec9 bias = gravity_vector(p, slope) + friction_vector(f, st.qr_dot);
    const Vec6 jcd =
        base_jacobians_dot(p, st.pose(2), st.pose_dot(2)).Jc * st.qdot();
    const VecX tq = osc_torque(s, c, t, task, bias, jcd, VecX());
    const DynamicsSolution d = forward_dynamics(p, f, slope, st, tq);
    EXPECT_LT((d.qdd.head<3>() - task.xdd_des).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Hierarchy, ZeroPrimaryTask) {
  std::mt19937_64 rng(8);
  const MatX a = random_spd(rng, 5);
  const ConstrainedSystem s{a, MatX(0, 5), MatX::Identity(5, 5)};
  const ConstraintOps c = constraint_operators(s);
  const MatX j2 = random_mat(rng, 2, 5);
  const HierarchyOps h = hierarchy_operators(s, c, MatX::Zero(3, 5), j2);
  EXPECT_LT(max_abs(h.N1 - MatX::Identity(5, 5)), 1e-14);
  EXPECT_LT(max_abs(h.Lambda2 - j2 * c.Ainv * j2.transpose()), 1e-12);
}

TEST(Hierarchy, SecondaryTorqueDoesNotDisturbPrimaryTask) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 30; ++k) {
    const ConstrainedSystem s = random_system(rng, 8, 2, 8);
    const ConstraintOps c = constraint_operators(s);
    const MatX j1 = random_mat(rng, 3, 8);
    const HierarchyOps h = hierarchy_operators(s, c, j1, random_mat(rng, 2, 8));
    const VecX tau2 = random_mat(rng, 8, 1);
    const VecX qdd = c.Ainv * c.Nc.transpose() * h.N1.transpose() * tau2;
    EXPECT_LT((j1 * c.Nc * qdd).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Hierarchy, NullspaceRank) {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> rk(0, 4);
  for (int k = 0; k < 50; ++k) {
    const ConstrainedSystem s = random_system(rng, 8, 2, 8);
    const ConstraintOps c = constraint_operators(s);
    const int r = rk(rng);
    // Rank-r primary task built from r random rows.
    MatX j1 = random_mat(rng, 5, r) * random_mat(rng, r, 8);
    if (r == 0) j1 = MatX::Zero(5, 8);
    const HierarchyOps h = hierarchy_operators(s, c, j1, MatX::Identity(8, 8));
    EXPECT_EQ(h.rank_j1nc, numerical_rank(j1 * c.Nc));
    EXPECT_EQ(h.rank_n1, 8 - h.rank_j1nc);
  }
}

TEST(ProjectDisplacement, FixedPointAndAnnihilation) {
  std::mt19937_64 rng(12);
  const ConstrainedSystem s{random_spd(rng, 6), MatX(0, 6), MatX::Identity(6, 6)};
  const ConstraintOps c = constraint_operators(s);
  const MatX j1 = random_mat(rng, 2, 6);
  const HierarchyOps h = hierarchy_operators(s, c, j1, MatX::Identity(6, 6));
  ASSERT_EQ(h.basis.cols(), 4);
  const VecX in_span = h.basis * random_mat(rng, 4, 1);
  ProjectedStep st = project_displacement(s, c, j1, in_span);
  EXPECT_LT((st.delta - in_span).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_FALSE(st.fully_constrained);
  // Orthogonal complement of the basis.
  Eigen::FullPivHouseholderQR<MatX> qr(h.basis);
  const MatX q = qr.matrixQ();
  const VecX orth = q.rightCols(2) * random_mat(rng, 2, 1);
  st = project_displacement(s, c, j1, orth);
  EXPECT_LT(st.delta.norm(), 1e-10);
  // Projected steps leave the primary task unchanged to first order.
  st = project_displacement(s, c, j1, random_mat(rng, 6, 1));
  EXPECT_LT((j1 * st.delta).norm(), 1e-10);
}

TEST(ProjectDisplacement, FullyConstrainedFlag) {
  const ConstrainedSystem s{MatX::Identity(3, 3), MatX(0, 3), MatX::Identity(3, 3)};
  const ConstraintOps c = constraint_operators(s);
  const ProjectedStep st =
      project_displacement(s, c, MatX::Identity(3, 3), Vec3(1, 2, 3));
  EXPECT_TRUE(st.fully_constrained);
  EXPECT_EQ(st.delta.norm(), 0.0);
}

TEST(AppendixIdentities, UNcInverseRecoversNullspace) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> dn(5, 10);
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    const int n = dn(rng);
    const int k = std::uniform_int_distribution<int>(1, n - 2)(rng);
    const int m = std::uniform_int_distribution<int>(n - k, n)(rng);
    const ConstrainedSystem s = random_system(rng, n, k, m);
    const ConstraintOps c = constraint_operators(s);
    const MatX unc = s.U * c.Nc;
    ASSERT_EQ(numerical_rank(unc), numerical_rank(c.Nc));
    const MatX bar = c.Ainv * unc.transpose() *
                     pinv(unc * c.Ainv * unc.transpose());
    EXPECT_LE(max_abs(bar * unc - c.Nc), 1e-9);
    ++checked;
  }
  EXPECT_EQ(checked, 200);
}

TEST(AppendixIdentities, PrioritizedNullspacesCommute) {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 50; ++t) {
    const int n = 10, k = 2, m = 9;
    const ConstrainedSystem s = random_system(rng, n, k, m);
    const ConstraintOps c = constraint_operators(s);
    const TaskOps base = task_operators(s, c, {random_mat(rng, 1, n), VecX()});
    const MatX phi = actuated_inverse_inertia(s, c);
    std::vector<MatX> js;
    for (int lvl = 0; lvl < 3; ++lvl) {
      js.push_back(random_mat(rng, 2, n) * base.UNc_bar);
    }
    const std::vector<MatX> ns = prioritized_nullspaces(phi, js);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < i; ++j) {
        EXPECT_LE(max_abs(ns[i] * ns[j] - ns[j] * ns[i]), 1e-9);
      }
    }
  }
}

TEST(AppendixIdentities, OperationalTorqueIsMinimumEffort) {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 50; ++t) {
    const int n = 8, k = 2, m = 7, tdim = 3;
    const ConstrainedSystem s = random_system(rng, n, k, m);
    const ConstraintOps c = constraint_operators(s);
    const TaskSpec task{random_mat(rng, tdim, n), random_mat(rng, tdim, 1)};
    const TaskOps op = task_operators(s, c, task);
    ASSERT_FALSE(op.rank_deficient);
    const VecX tau = op.J_star.transpose() * op.Lambda_star * task.xdd_des;
    const MatX unc = s.U * c.Nc;
    const MatX cmat = task.J * c.Ainv * unc.transpose();
    EXPECT_LT((cmat * tau - task.xdd_des).cwiseAbs().maxCoeff(), 1e-9);
    // Generic equality-constrained quadratic program, solved by KKT.
    const MatX phi = unc * c.Ainv * unc.transpose();
    MatX kkt = MatX::Zero(m + tdim, m + tdim);
    kkt.topLeftCorner(m, m) = 2.0 * phi;
    kkt.topRightCorner(m, tdim) = cmat.transpose();
    kkt.bottomLeftCorner(tdim, m) = cmat;
    VecX rhs = VecX::Zero(m + tdim);
    rhs.tail(tdim) = task.xdd_des;
    const VecX sol = pinv(kkt) * rhs;
    const VecX tau_ref = sol.head(m);
    const double cost = tau.dot(phi * tau);
    const double cost_ref = tau_ref.dot(phi * tau_ref);
    EXPECT_LE(std::abs(cost - cost_ref), 1e-8 * std::max(1.0, cost_ref));
    EXPECT_LE((unc.transpose() * (tau - tau_ref)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

}  // namespace
}  // namespace omnisafe
