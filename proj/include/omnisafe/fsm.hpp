#pragma once

#include <string>
#include <vector>

namespace omnisafe {

enum class AgentMode { kIdle, kIntervention, kCaution, kReturn };

std::string to_string(AgentMode m);

struct FsmConfig {
  double eta = 0.5;
  double caution_dwell = 1.0;  // T_C, s
  void validate() const;
};

// One prediction tick. p_ac[k] is pair k's accumulated probability at the
// time threshold; approach[k] is d_ij . v_ij (negative while closing).
struct FsmInput {
  double t = 0.0;
  std::vector<double> p_ac;
  std::vector<double> approach;
  bool at_home = false;
};

struct AgentState {
  AgentMode mode = AgentMode::kIdle;
  double caution_since = 0.0;
};

// Intervention persists while any pair is risky or still closing; caution
// needs every pair safe and receding.
AgentState fsm_step(const AgentState& s, const FsmInput& in, const FsmConfig& cfg);

}  // namespace omnisafe
