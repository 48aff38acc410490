#pragma once

#include <array>
#include <functional>
#include <vector>

#include "omnisafe/chain.hpp"

namespace omnisafe {

struct OctreeNode {
  Vec3 center = Vec3::Zero();
  double width = 0.0;  // edge length
  int depth = 0;
  std::array<int, 8> children{-1, -1, -1, -1, -1, -1, -1, -1};
  std::vector<int> records;  // only filled at max depth

  bool has_children() const { return children[0] >= 0; }
};

// Reachable-volume index. Capsules land in every max-depth cell whose center
// lies within cell width + radius of the capsule axis.
class Octree {
 public:
  explicit Octree(const Workspace& ws = {}, int max_depth = 6);

  void insert(const Capsule& c, int record);

  // Records of every leaf whose center is within `radius` of segment [a, b].
  // Records may repeat across leaves.
  void visit_near(const Vec3& a, const Vec3& b, double radius,
                  const std::function<void(int)>& f) const;

  int max_depth() const { return max_depth_; }
  double leaf_width() const;
  const Workspace& workspace() const { return ws_; }
  const std::vector<OctreeNode>& nodes() const { return nodes_; }

  // Leaves holding at least one record.
  std::vector<const OctreeNode*> occupied_leaves() const;

  // Whether the segment lies fully inside the root cube.
  bool contains(const Vec3& a, const Vec3& b) const;

 private:
  void insert_at(int node, const Vec3& p1, const Vec3& p2, double r, int record);
  void create_children(int node);
  void visit_at(int node, const Vec3& a, const Vec3& b, double radius,
                const std::function<void(int)>& f) const;

  Workspace ws_;
  int max_depth_;
  std::vector<OctreeNode> nodes_;
};

}  // namespace omnisafe
