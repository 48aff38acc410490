#pragma once

#include <optional>
#include <string>
#include <vector>

#include "omnisafe/fsm.hpp"
#include "omnisafe/roadmap.hpp"

namespace omnisafe {

struct Plan {
  std::vector<VecX> path;  // joint-space waypoints, current q first
  int link = -1;           // intervening link
  bool constrained = true;  // planned on the constrained roadmap
  VecX destination;
};

enum class DecisionBranch {
  kStay,                 // current posture already blocks the sweep
  kReusePlan,            // previous destination still blocks it
  kReuseLink,            // replanned with the previous intervening link
  kConstrained,          // found in the constrained volumes
  kUnconstrainedFallback,  // constrained search failed
  kViolatedTask,         // current state already off the end-effector goal
  kFail,                 // no volume reaches the sweep
};

std::string to_string(DecisionBranch b);

struct Decision {
  DecisionBranch branch = DecisionBranch::kFail;
  std::optional<Plan> plan;
  int link = -1;
  bool constraint_violated = false;
};

struct PlannerOptions {
  double goal_tolerance = 0.01;  // end-effector task satisfied within this
  int connect_candidates = 10;
};

// Picks the intervening link and a roadmap path. Non-end-effector links are
// preferred; among them the cheapest reachable configuration wins.
Decision decide_and_plan(const Roadmap& constrained, const Roadmap& unconstrained,
                         const VecX& q, AgentMode mode, const Plan* previous,
                         const ObjectSweep& obj, const PlannerOptions& opt = {});

}  // namespace omnisafe
