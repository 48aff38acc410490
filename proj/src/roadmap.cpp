#include "omnisafe/roadmap.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>

#include "omnisafe/geometry.hpp"
#include "omnisafe/rng.hpp"
#include "omnisafe/wbosc.hpp"

namespace omnisafe {

void PrmOptions::validate() const {
  if (budget < 0) throw InputError("prm: budget must be >= 0");
  if (!(step > 0)) throw InputError("prm: step must be positive");
  if (max_extend < 1) throw InputError("prm: max_extend must be >= 1");
  if (max_depth < 0 || max_depth > 12) throw InputError("prm: depth must be 0..12");
  if (!(goal_tolerance > 0)) throw InputError("prm: goal tolerance must be positive");
}

Roadmap::Roadmap(KinematicChain chain, PrmOptions options)
    : chain_(std::move(chain)), options_(std::move(options)) {
  chain_.validate();
  options_.validate();
  octrees_.assign(chain_.num_links(), Octree(chain_.workspace, options_.max_depth));
  overflow_.assign(chain_.num_links(), {});
  node_matrix_ = MatX(chain_.dofs(), 64);
}

int Roadmap::add_node(const VecX& q) {
  const int id = size();
  nodes_.push_back(q);
  if (node_matrix_.cols() <= id) {
    MatX grown(chain_.dofs(), 2 * node_matrix_.cols());
    grown.leftCols(node_matrix_.cols()) = node_matrix_;
    node_matrix_ = std::move(grown);
  }
  node_matrix_.col(id) = q;
  adjacency_.emplace_back();
  for (const Capsule& c : fk_capsules(chain_, q, id)) {
    const int rec = static_cast<int>(capsules_.size());
    capsules_.push_back(c);
    max_radius_ = std::max(max_radius_, c.radius);
    Octree& tree = octrees_[c.link];
    tree.insert(c, rec);
    if (!tree.contains(c.from, c.to)) overflow_[c.link].push_back(rec);
  }
  return id;
}

void Roadmap::add_edge(int a, int b) {
  if (a < 0 || b < 0 || a >= size() || b >= size() || a == b) {
    throw InputError("roadmap: edge endpoints must be distinct nodes");
  }
  const double w = (nodes_[a] - nodes_[b]).norm();
  edges_.emplace_back(a, b);
  adjacency_[a].emplace_back(b, w);
  adjacency_[b].emplace_back(a, w);
}

std::vector<int> Roadmap::nearest(const VecX& q, int k) const {
  const int n = size();
  if (n == 0 || k < 1) return {};
  const VecX d2 = (node_matrix_.leftCols(n).colwise() - q).colwise().squaredNorm();
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  const int m = std::min(k, n);
  std::partial_sort(idx.begin(), idx.begin() + m, idx.end(), [&](int a, int b) {
    return d2(a) < d2(b) || (d2(a) == d2(b) && a < b);
  });
  idx.resize(m);
  return idx;
}

bool Roadmap::correct(VecX& q) const {
  if (!options_.goal) return true;
  for (int it = 0; it < 8; ++it) {
    const Vec3 e = end_effector(chain_, q) - *options_.goal;
    if (e.norm() <= 1e-10) break;
    q -= pinv(ee_jacobian(chain_, q)) * e;
  }
  return (end_effector(chain_, q) - *options_.goal).norm() <= options_.goal_tolerance;
}

bool Roadmap::admissible(const VecX& q) const {
  if (!feasible(chain_, q)) return false;
  if (!options_.goal) return true;
  return (end_effector(chain_, q) - *options_.goal).norm() <= options_.goal_tolerance;
}

namespace {

VecX sample_uniform(const KinematicChain& chain, Engine& rng) {
  VecX q(chain.dofs());
  for (int i = 0; i < chain.dofs(); ++i) {
    std::uniform_real_distribution<double> u(chain.joints[i].lower,
                                             chain.joints[i].upper);
    q(i) = u(rng);
  }
  return q;
}

// Null-space projector of the end-effector task with unit inertia.
struct TaskProjector {
  ConstrainedSystem sys;
  ConstraintOps ops;

  explicit TaskProjector(int n)
      : sys{MatX::Identity(n, n), MatX(0, n), MatX::Identity(n, n)},
        ops(constraint_operators(sys)) {}

  ProjectedStep operator()(const KinematicChain& chain, const VecX& q,
                           const VecX& dq) const {
    return project_displacement(sys, ops, ee_jacobian(chain, q), dq);
  }
};

}  // namespace

Roadmap prm_learn(const KinematicChain& chain, const PrmOptions& options) {
  Roadmap rm(chain, options);
  if (options.budget == 0) return rm;
  Engine rng = make_engine(options.seed, "prm");
  const TaskProjector project(chain.dofs());

  VecX seed_q = chain.home;
  if (!rm.correct(seed_q) || !rm.admissible(seed_q)) seed_q.resize(0);
  int drawn = 0;
  while (seed_q.size() == 0 && drawn < options.budget) {
    VecX q = sample_uniform(chain, rng);
    ++drawn;
    if (rm.correct(q) && rm.admissible(q)) seed_q = q;
  }
  if (seed_q.size() == 0) {
    throw PlanError("prm: sampler exhausted before any feasible configuration");
  }
  rm.add_node(seed_q);

  for (; drawn < options.budget; ++drawn) {
    const VecX q_new = sample_uniform(chain, rng);
    const int near = rm.nearest(q_new).front();
    VecX q_prev = rm.nodes()[near];
    int prev_id = near;
    const double reach = (q_new - q_prev).norm();
    VecX delta;
    if (!rm.constrained()) {
      if (reach == 0.0) continue;
      delta = (q_new - q_prev) / reach * options.step;
    }
    double travelled = 0.0;
    for (int s = 0; s < options.max_extend && travelled + 0.5 * options.step <= reach;
         ++s) {
      VecX q;
      if (rm.constrained()) {
        // Re-project at every step; the task null space rotates with q.
        const ProjectedStep ps = project(chain, q_prev, q_new - q_prev);
        const double n = ps.delta.norm();
        if (ps.fully_constrained || n < 1e-12) break;
        q = q_prev + ps.delta / n * options.step;
        if (!rm.correct(q)) break;
      } else {
        q = q_prev + delta;
      }
      if (!rm.admissible(q)) break;
      travelled += options.step;
      const int id = rm.add_node(q);
      rm.add_edge(id, prev_id);
      q_prev = q;
      prev_id = id;
    }
  }
  return rm;
}

bool capsule_hits(const Capsule& c, const ObjectSweep& obj) {
  return segment_distance(c.from, c.to, obj.p, obj.end()) <= obj.radius + c.radius;
}

LinkSets brute_force_intersections(const Roadmap& rm, const ObjectSweep& obj) {
  LinkSets out(rm.chain().num_links());
  for (const Capsule& c : rm.capsules()) {
    if (capsule_hits(c, obj)) out[c.link].push_back(c.config);
  }
  for (auto& s : out) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return out;
}

LinkSets search_intersections(const Roadmap& rm, const ObjectSweep& obj) {
  const int nl = rm.chain().num_links();
  LinkSets out(nl);
  if (rm.empty()) return out;
  std::vector<char> seen(rm.capsules().size(), 0);
  auto check = [&](int rec) {
    if (seen[rec]) return;
    seen[rec] = 1;
    const Capsule& c = rm.capsules()[rec];
    if (capsule_hits(c, obj)) out[c.link].push_back(c.config);
  };
  for (int l = 0; l < nl; ++l) {
    const Octree& tree = rm.octree(l);
    // A hit capsule's closest point sits in a leaf that stores it; that leaf
    // center is within half a cell diagonal of the point.
    const double radius =
        obj.radius + rm.max_radius() + 0.5 * std::sqrt(3.0) * tree.leaf_width();
    tree.visit_near(obj.p, obj.end(), radius, check);
    for (int rec : rm.overflow(l)) check(rec);
  }
  for (auto& s : out) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return out;
}

std::optional<std::vector<int>> shortest_path(const Roadmap& rm, int start,
                                              const std::vector<int>& targets) {
  if (start < 0 || start >= rm.size()) throw InputError("path: bad start node");
  std::vector<char> goal(rm.size(), 0);
  for (int t : targets) {
    if (t >= 0 && t < rm.size()) goal[t] = 1;
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(rm.size(), inf);
  std::vector<int> parent(rm.size(), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[start] = 0.0;
  pq.emplace(0.0, start);
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    if (goal[u]) {
      std::vector<int> path;
      for (int v = u; v >= 0; v = parent[v]) path.push_back(v);
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (const auto& [v, w] : rm.adjacency()[u]) {
      if (d + w < dist[v]) {
        dist[v] = d + w;
        parent[v] = u;
        pq.emplace(dist[v], v);
      }
    }
  }
  return std::nullopt;
}

std::optional<Connection> connect(const Roadmap& rm, const VecX& q, int candidates) {
  if (q.size() != rm.chain().dofs()) throw InputError("connect: size mismatch");
  const double step = rm.options().step;
  for (int node : rm.nearest(q, candidates)) {
    const VecX& target = rm.nodes()[node];
    const double len = (target - q).norm();
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / step)));
    Connection c;
    c.node = node;
    c.bridge.push_back(q);
    bool ok = true;
    for (int k = 1; k < pieces && ok; ++k) {
      VecX x = q + (target - q) * (static_cast<double>(k) / pieces);
      ok = rm.correct(x) && rm.admissible(x);
      c.bridge.push_back(x);
    }
    if (!ok) continue;
    c.bridge.push_back(target);
    return c;
  }
  return std::nullopt;
}

namespace {

void put_u8(std::ostream& os, std::uint8_t v) { os.put(static_cast<char>(v)); }

template <typename U>
void put_le(std::ostream& os, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    os.put(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
}

void put_f64(std::ostream& os, double d) { put_le(os, std::bit_cast<std::uint64_t>(d)); }

template <typename U>
U get_le(std::istream& is) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) throw InputError("roadmap: truncated file");
    v |= static_cast<U>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_le<std::uint64_t>(is)); }

constexpr char kMagic[8] = {'O', 'M', 'N', 'I', 'R', 'V', '1', '\0'};

}  // namespace

void save_roadmap(std::ostream& os, const Roadmap& rm) {
  const PrmOptions& o = rm.options();
  const KinematicChain& ch = rm.chain();
  os.write(kMagic, 8);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(ch.name.size()));
  os.write(ch.name.data(), static_cast<std::streamsize>(ch.name.size()));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(ch.dofs()));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(ch.num_links()));
  put_f64(os, o.step);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(o.max_extend));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(o.max_depth));
  put_u8(os, o.goal ? 1 : 0);
  const Vec3 g = o.goal.value_or(Vec3::Zero());
  for (int i = 0; i < 3; ++i) put_f64(os, g(i));
  put_f64(os, o.goal_tolerance);
  put_le<std::uint64_t>(os, o.seed);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(o.budget));
  put_le<std::uint64_t>(os, static_cast<std::uint64_t>(rm.size()));
  for (const VecX& q : rm.nodes()) {
    for (int i = 0; i < q.size(); ++i) put_f64(os, q(i));
  }
  put_le<std::uint64_t>(os, static_cast<std::uint64_t>(rm.edges().size()));
  for (const auto& [a, b] : rm.edges()) {
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(a));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(b));
  }
  if (!os) throw NumericalError("roadmap: write failed");
}

Roadmap load_roadmap(std::istream& is, const KinematicChain& chain) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    throw InputError("roadmap: bad magic");
  }
  const auto name_len = get_le<std::uint32_t>(is);
  if (name_len > 4096) throw InputError("roadmap: bad chain name length");
  std::string name(name_len, '\0');
  if (!is.read(name.data(), name_len)) throw InputError("roadmap: truncated file");
  if (name != chain.name) {
    throw InputError("roadmap: built for chain '" + name + "', not '" + chain.name + "'");
  }
  const auto dofs = get_le<std::uint32_t>(is);
  const auto links = get_le<std::uint32_t>(is);
  if (static_cast<int>(dofs) != chain.dofs() ||
      static_cast<int>(links) != chain.num_links()) {
    throw InputError("roadmap: chain shape mismatch");
  }
  PrmOptions o;
  o.step = get_f64(is);
  o.max_extend = static_cast<int>(get_le<std::uint32_t>(is));
  o.max_depth = static_cast<int>(get_le<std::uint32_t>(is));
  const int has_goal = is.get();
  Vec3 g;
  for (int i = 0; i < 3; ++i) g(i) = get_f64(is);
  if (has_goal == 1) o.goal = g;
  else if (has_goal != 0) throw InputError("roadmap: bad goal flag");
  o.goal_tolerance = get_f64(is);
  o.seed = get_le<std::uint64_t>(is);
  o.budget = static_cast<int>(get_le<std::uint32_t>(is));
  Roadmap rm(chain, o);
  const auto n = get_le<std::uint64_t>(is);
  for (std::uint64_t k = 0; k < n; ++k) {
    VecX q(dofs);
    for (std::uint32_t i = 0; i < dofs; ++i) q(i) = get_f64(is);
    rm.add_node(q);
  }
  const auto ne = get_le<std::uint64_t>(is);
  for (std::uint64_t k = 0; k < ne; ++k) {
    const auto a = get_le<std::uint32_t>(is);
    const auto b = get_le<std::uint32_t>(is);
    if (a >= n || b >= n) throw InputError("roadmap: edge references missing node");
    rm.add_edge(static_cast<int>(a), static_cast<int>(b));
  }
  return rm;
}

}  // namespace omnisafe
