#include "omnisafe/planner.hpp"

#include <limits>
#include <queue>

namespace omnisafe {

std::string to_string(DecisionBranch b) {
  switch (b) {
    case DecisionBranch::kStay: return "stay";
    case DecisionBranch::kReusePlan: return "reuse_plan";
    case DecisionBranch::kReuseLink: return "reuse_link";
    case DecisionBranch::kConstrained: return "constrained";
    case DecisionBranch::kUnconstrainedFallback: return "unconstrained_fallback";
    case DecisionBranch::kViolatedTask: return "violated_task";
    case DecisionBranch::kFail: return "fail";
  }
  return "?";
}

namespace {

struct Tree {
  std::vector<double> dist;
  std::vector<int> parent;
};

Tree dijkstra(const Roadmap& rm, int start) {
  Tree t{std::vector<double>(rm.size(), std::numeric_limits<double>::infinity()),
         std::vector<int>(rm.size(), -1)};
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  t.dist[start] = 0.0;
  pq.emplace(0.0, start);
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > t.dist[u]) continue;
    for (const auto& [v, w] : rm.adjacency()[u]) {
      if (d + w < t.dist[v]) {
        t.dist[v] = d + w;
        t.parent[v] = u;
        pq.emplace(t.dist[v], v);
      }
    }
  }
  return t;
}

// Cheapest reachable member of each allowed link's set; non-end-effector
// links first.
std::optional<Plan> plan_on(const Roadmap& rm, const VecX& q, const LinkSets& sets,
                            const std::vector<int>& links, const PlannerOptions& opt) {
  bool any = false;
  for (int l : links) any = any || !sets[l].empty();
  if (!any) return std::nullopt;
  const std::optional<Connection> conn = connect(rm, q, opt.connect_candidates);
  if (!conn) throw PlanError("planner: cannot connect configuration to roadmap");
  const Tree tree = dijkstra(rm, conn->node);
  const int ee = rm.chain().ee_link;
  int best_link = -1, best_node = -1;
  double best = std::numeric_limits<double>::infinity();
  for (int pass = 0; pass < 2 && best_node < 0; ++pass) {
    for (int l : links) {
      if ((l == ee) != (pass == 1)) continue;
      for (int node : sets[l]) {
        if (tree.dist[node] < best) {
          best = tree.dist[node];
          best_node = node;
          best_link = l;
        }
      }
    }
  }
  if (best_node < 0) return std::nullopt;
  std::vector<int> nodes;
  for (int v = best_node; v >= 0; v = tree.parent[v]) nodes.push_back(v);
  Plan p;
  p.path = conn->bridge;
  for (auto it = nodes.rbegin() + 1; it != nodes.rend(); ++it) {
    p.path.push_back(rm.nodes()[*it]);
  }
  p.link = best_link;
  p.constrained = rm.constrained();
  p.destination = rm.nodes()[best_node];
  return p;
}

std::vector<int> all_links(const KinematicChain& c) {
  std::vector<int> v(c.num_links());
  for (int i = 0; i < c.num_links(); ++i) v[i] = i;
  return v;
}

}  // namespace

Decision decide_and_plan(const Roadmap& constrained, const Roadmap& unconstrained,
                         const VecX& q, AgentMode mode, const Plan* previous,
                         const ObjectSweep& obj, const PlannerOptions& opt) {
  const KinematicChain& chain = unconstrained.chain();
  Decision d;

  // (a) current posture already in the way.
  const std::vector<Capsule> now = fk_capsules(chain, q);
  for (int pass = 0; pass < 2 && d.link < 0; ++pass) {
    for (const Capsule& c : now) {
      if ((c.link == chain.ee_link) != (pass == 1)) continue;
      if (capsule_hits(c, obj)) {
        d.link = c.link;
        break;
      }
    }
  }
  const bool task_ok =
      constrained.constrained() &&
      (end_effector(chain, q) - *constrained.options().goal).norm() <= opt.goal_tolerance;
  if (d.link >= 0) {
    d.branch = DecisionBranch::kStay;
    Plan p;
    p.path = {q};
    p.link = d.link;
    p.constrained = task_ok;
    p.destination = q;
    d.plan = p;
    d.constraint_violated = !task_ok;
    return d;
  }

  // (b) already intervening: (f) keep the plan, (g) keep the link.
  if (mode == AgentMode::kIntervention && previous && previous->link >= 0 &&
      previous->destination.size() == chain.dofs()) {
    const Capsule dest = fk_capsules(chain, previous->destination)[previous->link];
    if (capsule_hits(dest, obj)) {
      d.branch = DecisionBranch::kReusePlan;
      d.plan = *previous;
      d.link = previous->link;
      d.constraint_violated = !previous->constrained;
      return d;
    }
    const Roadmap& rm = previous->constrained ? constrained : unconstrained;
    if (!previous->constrained || task_ok) {
      const LinkSets sets = search_intersections(rm, obj);
      if (auto p = plan_on(rm, q, sets, {previous->link}, opt)) {
        d.branch = DecisionBranch::kReuseLink;
        d.link = p->link;
        d.constraint_violated = !p->constrained;
        d.plan = std::move(p);
        return d;
      }
    }
  }

  const std::vector<int> links = all_links(chain);
  // (c) task already violated: only unconstrained volumes apply.
  if (!task_ok) {
    if (auto p = plan_on(unconstrained, q, search_intersections(unconstrained, obj),
                         links, opt)) {
      d.branch = DecisionBranch::kViolatedTask;
      d.link = p->link;
      d.constraint_violated = true;
      d.plan = std::move(p);
    }
    return d;
  }
  if (auto p = plan_on(constrained, q, search_intersections(constrained, obj), links,
                       opt)) {
    d.branch = DecisionBranch::kConstrained;
    d.link = p->link;
    d.plan = std::move(p);
    return d;
  }
  if (auto p = plan_on(unconstrained, q, search_intersections(unconstrained, obj),
                       links, opt)) {
    d.branch = DecisionBranch::kUnconstrainedFallback;
    d.link = p->link;
    d.constraint_violated = true;
    d.plan = std::move(p);
  }
  return d;
}

}  // namespace omnisafe
