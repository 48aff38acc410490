#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "omnisafe/chain.hpp"
#include "omnisafe/octree.hpp"

namespace omnisafe {

class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PrmOptions {
  int budget = 10000;  // random samples drawn
  std::uint64_t seed = 1;
  double step = 0.05;  // rad
  int max_extend = 40;  // steps per extension
  int max_depth = 6;
  // End-effector goal; set for the constrained roadmap.
  std::optional<Vec3> goal;
  double goal_tolerance = 1e-4;  // accepted end-effector error per node
  void validate() const;
};

class Roadmap {
 public:
  Roadmap() = default;
  Roadmap(KinematicChain chain, PrmOptions options);

  const KinematicChain& chain() const { return chain_; }
  const PrmOptions& options() const { return options_; }
  bool constrained() const { return options_.goal.has_value(); }

  int size() const { return static_cast<int>(nodes_.size()); }
  bool empty() const { return nodes_.empty(); }
  const std::vector<VecX>& nodes() const { return nodes_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<std::vector<std::pair<int, double>>>& adjacency() const {
    return adjacency_;
  }
  const std::vector<Capsule>& capsules() const { return capsules_; }
  const Octree& octree(int link) const { return octrees_.at(link); }
  const std::vector<int>& overflow(int link) const { return overflow_.at(link); }
  double max_radius() const { return max_radius_; }

  int add_node(const VecX& q);
  void add_edge(int a, int b);

  // Node indices ordered by joint-space distance, at most k.
  std::vector<int> nearest(const VecX& q, int k = 1) const;

  // Newton correction of q onto the end-effector goal; false when it fails.
  bool correct(VecX& q) const;
  // Feasible and, when constrained, on the goal.
  bool admissible(const VecX& q) const;

 private:
  KinematicChain chain_;
  PrmOptions options_;
  std::vector<VecX> nodes_;
  MatX node_matrix_;  // dofs x capacity, columns mirror nodes_
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<std::pair<int, double>>> adjacency_;
  std::vector<Capsule> capsules_;
  std::vector<Octree> octrees_;
  std::vector<std::vector<int>> overflow_;
  double max_radius_ = 0.0;
};

// Sampling-based learning phase. Each random sample extends the tree from its
// nearest node in fixed steps; constrained roadmaps project every step into
// the null space of the end-effector task and correct the residual drift.
Roadmap prm_learn(const KinematicChain& chain, const PrmOptions& options);

struct ObjectSweep {
  Vec3 p;
  Vec3 v;
  double radius = 0.0;
  double horizon = 1.0;  // t_d, s

  Vec3 end() const { return p + horizon * v; }
};

using LinkSets = std::vector<std::vector<int>>;  // per link, sorted node ids

LinkSets search_intersections(const Roadmap& rm, const ObjectSweep& obj);
LinkSets brute_force_intersections(const Roadmap& rm, const ObjectSweep& obj);
bool capsule_hits(const Capsule& c, const ObjectSweep& obj);

// Uniform-cost search over roadmap edges to the cheapest target.
std::optional<std::vector<int>> shortest_path(const Roadmap& rm, int start,
                                              const std::vector<int>& targets);

struct Connection {
  int node = -1;
  std::vector<VecX> bridge;  // from q to the node, endpoints included
};

// Joins q to a nearby node by a feasible straight (or goal-corrected) segment.
std::optional<Connection> connect(const Roadmap& rm, const VecX& q,
                                  int candidates = 10);

// Binary layout, little-endian:
//   "OMNIRV1\0", u32 name length, name bytes, u32 dofs, u32 links,
//   f64 step, u32 max_extend, u32 max_depth, u8 has_goal, f64[3] goal,
//   f64 goal_tolerance, u64 seed, u32 budget,
//   u64 nodes, f64[dofs] per node, u64 edges, u32 a, u32 b per edge.
// Capsules and octrees are rebuilt from the nodes on load.
void save_roadmap(std::ostream& os, const Roadmap& rm);
Roadmap load_roadmap(std::istream& is, const KinematicChain& chain);

}  // namespace omnisafe
