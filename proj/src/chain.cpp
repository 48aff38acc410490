#include "omnisafe/chain.hpp"

#include <Eigen/Geometry>

#include "omnisafe/geometry.hpp"

namespace omnisafe {

void KinematicChain::validate() const {
  if (joints.empty()) throw InputError("chain: no joints");
  for (const Joint& j : joints) {
    if (std::abs(j.axis.norm() - 1.0) > 1e-12) {
      throw InputError("chain: joint axis must be unit length");
    }
    if (!(j.lower <= j.upper)) throw InputError("chain: inverted joint limits");
  }
  for (const LinkTemplate& l : links) {
    if (l.frame < -1 || l.frame >= dofs()) throw InputError("chain: bad link frame");
    if (!(l.radius > 0)) throw InputError("chain: capsule radius must be positive");
  }
  if (ee_frame < -1 || ee_frame >= dofs()) throw InputError("chain: bad ee frame");
  if (ee_link < 0 || ee_link >= num_links()) throw InputError("chain: bad ee link");
  if (home.size() != dofs()) throw InputError("chain: home size mismatch");
  if (!(workspace.width > 0)) throw InputError("chain: workspace width");
}

VecX KinematicChain::lower() const {
  VecX v(dofs());
  for (int i = 0; i < dofs(); ++i) v(i) = joints[i].lower;
  return v;
}

VecX KinematicChain::upper() const {
  VecX v(dofs());
  for (int i = 0; i < dofs(); ++i) v(i) = joints[i].upper;
  return v;
}

bool KinematicChain::within_limits(const VecX& q, double tol) const {
  if (q.size() != dofs()) return false;
  for (int i = 0; i < dofs(); ++i) {
    if (!(q(i) >= joints[i].lower - tol && q(i) <= joints[i].upper + tol)) {
      return false;
    }
  }
  return true;
}

VecX KinematicChain::clamp(const VecX& q) const {
  return q.cwiseMax(lower()).cwiseMin(upper());
}

KinematicChain planar_two_link(double l1, double l2, double radius) {
  KinematicChain c;
  c.name = "planar2";
  c.joints = {Joint{Vec3::Zero(), Vec3::UnitZ(), -kPi, kPi},
              Joint{Vec3(l1, 0, 0), Vec3::UnitZ(), -kPi, kPi}};
  c.links = {LinkTemplate{"upper", 0, Vec3::Zero(), Vec3(l1, 0, 0), radius},
             LinkTemplate{"fore", 1, Vec3::Zero(), Vec3(l2, 0, 0), radius}};
  c.ee_frame = 1;
  c.ee_point = Vec3(l2, 0, 0);
  c.ee_link = 1;
  c.home = VecX::Zero(2);
  c.workspace = {Vec3::Zero(), 2.0};
  return c;
}

KinematicChain humanoid_arm() {
  KinematicChain c;
  c.name = "humanoid_arm";
  const Vec3 x = Vec3::UnitX(), y = Vec3::UnitY(), z = Vec3::UnitZ();
  c.joints = {
      {Vec3(0, 0, 0.3), z, -1.0, 1.0},       // torso yaw
      {Vec3::Zero(), y, -0.3, 0.5},          // torso pitch
      {Vec3(0, 0.22, 0.25), y, -2.5, 0.8},   // shoulder pitch
      {Vec3::Zero(), x, -0.2, 1.5},          // shoulder roll
      {Vec3::Zero(), z, -1.5, 1.5},          // shoulder yaw
      {Vec3(0, 0, -0.3), y, -2.3, 0.0},      // elbow
      {Vec3::Zero(), z, -1.5, 1.5},          // wrist yaw
      {Vec3(0, 0, -0.28), y, -1.2, 1.2},     // wrist pitch
      {Vec3::Zero(), x, -1.2, 1.2},          // wrist roll
  };
  c.links = {
      {"torso_lower", -1, Vec3::Zero(), Vec3(0, 0, 0.3), 0.1},
      {"torso_upper", 1, Vec3::Zero(), Vec3(0, 0, 0.3), 0.1},
      {"upper_arm", 4, Vec3::Zero(), Vec3(0, 0, -0.3), 0.05},
      {"forearm", 6, Vec3::Zero(), Vec3(0, 0, -0.28), 0.045},
      {"hand", 8, Vec3::Zero(), Vec3(0, 0, -0.1), 0.04},
  };
  c.ee_frame = 8;
  c.ee_point = Vec3(0, 0, -0.1);
  c.ee_link = 4;
  c.home = VecX::Zero(9);
  c.home(2) = -0.3;
  c.home(5) = -1.2;
  c.workspace = {Vec3(0, 0, 0.5), 2.0};
  return c;
}

std::vector<Frame> fk_frames(const KinematicChain& chain, const VecX& q) {
  if (q.size() != chain.dofs()) throw InputError("fk: configuration size mismatch");
  std::vector<Frame> frames(chain.joints.size());
  Frame cur;
  for (int j = 0; j < chain.dofs(); ++j) {
    const Joint& jt = chain.joints[j];
    cur.p += cur.R * jt.offset;
    cur.R = cur.R * Eigen::AngleAxisd(q(j), jt.axis).toRotationMatrix();
    frames[j] = cur;
  }
  return frames;
}

namespace {

Vec3 to_world(const std::vector<Frame>& frames, int f, const Vec3& local) {
  if (f < 0) return local;
  return frames[f].p + frames[f].R * local;
}

}  // namespace

std::vector<Capsule> fk_capsules(const KinematicChain& chain, const VecX& q,
                                 int config) {
  const std::vector<Frame> frames = fk_frames(chain, q);
  std::vector<Capsule> out;
  out.reserve(chain.links.size());
  for (int i = 0; i < chain.num_links(); ++i) {
    const LinkTemplate& l = chain.links[i];
    out.push_back({to_world(frames, l.frame, l.from), to_world(frames, l.frame, l.to),
                   l.radius, config, i});
  }
  return out;
}

Vec3 end_effector(const KinematicChain& chain, const VecX& q) {
  return to_world(fk_frames(chain, q), chain.ee_frame, chain.ee_point);
}

MatX ee_jacobian(const KinematicChain& chain, const VecX& q) {
  const std::vector<Frame> frames = fk_frames(chain, q);
  const Vec3 pe = to_world(frames, chain.ee_frame, chain.ee_point);
  MatX j = MatX::Zero(3, chain.dofs());
  for (int i = 0; i <= chain.ee_frame; ++i) {
    // The rotation about the joint axis leaves the axis itself fixed.
    const Vec3 axis = frames[i].R * chain.joints[i].axis;
    j.col(i) = axis.cross(pe - frames[i].p);
  }
  return j;
}

bool self_collision_free(const KinematicChain& chain, const VecX& q) {
  const std::vector<Capsule> caps = fk_capsules(chain, q);
  for (std::size_t i = 0; i < caps.size(); ++i) {
    for (std::size_t j = i + 2; j < caps.size(); ++j) {
      const double d = segment_distance(caps[i].from, caps[i].to, caps[j].from,
                                        caps[j].to);
      if (d < caps[i].radius + caps[j].radius) return false;
    }
  }
  return true;
}

bool feasible(const KinematicChain& chain, const VecX& q) {
  return chain.within_limits(q) && self_collision_free(chain, q);
}

}  // namespace omnisafe
