#pragma once

#include <optional>
#include <string>
#include <vector>

#include "omnisafe/planner.hpp"
#include "omnisafe/runlog.hpp"
#include "omnisafe/scenario.hpp"

namespace omnisafe {

struct SimSummary {
  BaseState initial_state;
  BaseState final_state;
  std::optional<double> first_impact;   // first impact touch time
  std::optional<double> detection;      // first detector firing
  std::optional<Vec3> escape_onset;     // pose latched at the first escape
  double final_displacement = 0.0;      // |final - escape onset|, planar
  std::optional<WallFit> wall_fit;
  int wall_contact_steps = 0;
  double max_wall_normal_velocity = 0.0;
  double max_rolling_residual = 0.0;
  std::optional<int> trigger_tick;    // first INTERVENTION tick
  std::optional<int> predicted_tick;  // brute force on the true trajectories
  std::vector<AgentMode> modes;       // FSM mode sequence, changes only
  std::vector<DecisionBranch> branches;  // decisions, changes only
};

struct SimResult {
  RunLog log;
  SimSummary summary;
};

// Fixed-step semi-implicit Euler over the whole scenario. Deterministic for
// a fixed seed: every random consumer draws from its own labelled stream.
SimResult run_scenario(const Scenario& s);

// Roadmaps for the planner section, learned or loaded as configured.
struct PlannerRoadmaps {
  Roadmap unconstrained;
  Roadmap constrained;
};
PlannerRoadmaps planner_roadmaps(const Scenario& s);
KinematicChain chain_named(const std::string& name);

// Accumulated risk of every object pair from the initial states, one
// prediction over the configured horizon.
std::vector<PairRisk> predict_initial(const Scenario& s);
void log_risks(RunLog& log, double t, const std::vector<PairRisk>& risks);

// Re-runs wrench estimation, detection and localization over the dynamics
// and torque records of a log. The detector window counts logged samples.
RunLog reestimate(const Scenario& s, const RunLog& in);

}  // namespace omnisafe
