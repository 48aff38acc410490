#include "omnisafe/octree.hpp"

#include <cmath>

#include "omnisafe/geometry.hpp"

namespace omnisafe {

Octree::Octree(const Workspace& ws, int max_depth) : ws_(ws), max_depth_(max_depth) {
  if (!(ws.width > 0)) throw InputError("octree: workspace width must be positive");
  if (max_depth < 0 || max_depth > 12) throw InputError("octree: depth must be 0..12");
  OctreeNode root;
  root.center = ws.center;
  root.width = ws.width;
  nodes_.push_back(root);
}

double Octree::leaf_width() const { return ws_.width / std::ldexp(1.0, max_depth_); }

bool Octree::contains(const Vec3& a, const Vec3& b) const {
  const double h = 0.5 * ws_.width;
  return ((a - ws_.center).cwiseAbs().maxCoeff() <= h) &&
         ((b - ws_.center).cwiseAbs().maxCoeff() <= h);
}

void Octree::create_children(int node) {
  const double w = 0.5 * nodes_[node].width;
  const Vec3 c = nodes_[node].center;
  const int depth = nodes_[node].depth + 1;
  for (int k = 0; k < 8; ++k) {
    OctreeNode child;
    child.width = w;
    child.depth = depth;
    child.center = c + 0.5 * w * Vec3((k & 1) ? 1 : -1, (k & 2) ? 1 : -1,
                                      (k & 4) ? 1 : -1);
    nodes_.push_back(child);
    nodes_[node].children[k] = static_cast<int>(nodes_.size()) - 1;
  }
}

void Octree::insert(const Capsule& c, int record) {
  insert_at(0, c.from, c.to, c.radius, record);
}

void Octree::insert_at(int node, const Vec3& p1, const Vec3& p2, double r,
                       int record) {
  if (nodes_[node].depth == max_depth_) {
    nodes_[node].records.push_back(record);
    return;
  }
  if (!nodes_[node].has_children()) create_children(node);
  for (int k = 0; k < 8; ++k) {
    const int child = nodes_[node].children[k];
    const double d = point_segment_distance(nodes_[child].center, p1, p2);
    if (d <= nodes_[child].width + r) insert_at(child, p1, p2, r, record);
  }
}

void Octree::visit_near(const Vec3& a, const Vec3& b, double radius,
                        const std::function<void(int)>& f) const {
  visit_at(0, a, b, radius, f);
}

void Octree::visit_at(int node, const Vec3& a, const Vec3& b, double radius,
                      const std::function<void(int)>& f) const {
  const OctreeNode& n = nodes_[node];
  const double d = point_segment_distance(n.center, a, b);
  if (n.depth == max_depth_) {
    if (d <= radius) {
      for (int r : n.records) f(r);
    }
    return;
  }
  // Any leaf center inside this cube is within the half-diagonal of ours.
  if (d > radius + 0.5 * std::sqrt(3.0) * n.width) return;
  if (!n.has_children()) return;
  for (int child : n.children) visit_at(child, a, b, radius, f);
}

std::vector<const OctreeNode*> Octree::occupied_leaves() const {
  std::vector<const OctreeNode*> out;
  for (const OctreeNode& n : nodes_) {
    if (n.depth == max_depth_ && !n.records.empty()) out.push_back(&n);
  }
  return out;
}

}  // namespace omnisafe
