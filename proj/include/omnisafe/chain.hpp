#pragma once

#include <string>
#include <vector>

#include "omnisafe/linalg.hpp"

namespace omnisafe {

struct Capsule {
  Vec3 from;
  Vec3 to;
  double radius = 0.0;
  int config = -1;  // roadmap node owning this pose, -1 when unregistered
  int link = -1;
};

// Revolute joint: translate by offset in the parent frame, then rotate about
// axis (unit, parent-after-offset frame).
struct Joint {
  Vec3 offset = Vec3::Zero();
  Vec3 axis = Vec3::UnitZ();
  double lower = -kPi;
  double upper = kPi;
};

// Capsule attached to frame `frame` (-1 is the base frame; j is the frame
// after joint j).
struct LinkTemplate {
  std::string name;
  int frame = -1;
  Vec3 from = Vec3::Zero();
  Vec3 to = Vec3::Zero();
  double radius = 0.05;
};

struct Frame {
  Mat3 R = Mat3::Identity();
  Vec3 p = Vec3::Zero();
};

struct Workspace {
  Vec3 center = Vec3::Zero();
  double width = 2.0;  // edge length of the root cube
};

struct KinematicChain {
  std::string name;
  std::vector<Joint> joints;
  std::vector<LinkTemplate> links;
  int ee_frame = 0;
  Vec3 ee_point = Vec3::Zero();
  int ee_link = 0;  // link carrying the end-effector
  VecX home;
  Workspace workspace;

  int dofs() const { return static_cast<int>(joints.size()); }
  int num_links() const { return static_cast<int>(links.size()); }
  void validate() const;

  VecX lower() const;
  VecX upper() const;
  bool within_limits(const VecX& q, double tol = 0.0) const;
  VecX clamp(const VecX& q) const;
};

// Two links in the xy plane about z. Home is q = 0 along +x.
KinematicChain planar_two_link(double l1 = 0.5, double l2 = 0.4,
                               double radius = 0.05);

// Torso (yaw, pitch) plus a 7-joint left arm; five capsules.
KinematicChain humanoid_arm();

std::vector<Frame> fk_frames(const KinematicChain& chain, const VecX& q);
std::vector<Capsule> fk_capsules(const KinematicChain& chain, const VecX& q,
                                 int config = -1);
Vec3 end_effector(const KinematicChain& chain, const VecX& q);

// 3 x n positional Jacobian of the end-effector point.
MatX ee_jacobian(const KinematicChain& chain, const VecX& q);

// Limits plus no contact between non-adjacent capsules (|i - j| >= 2).
bool self_collision_free(const KinematicChain& chain, const VecX& q);
bool feasible(const KinematicChain& chain, const VecX& q);

}  // namespace omnisafe
