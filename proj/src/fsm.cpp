#include "omnisafe/fsm.hpp"

#include <algorithm>

#include "omnisafe/linalg.hpp"

namespace omnisafe {

std::string to_string(AgentMode m) {
  switch (m) {
    case AgentMode::kIdle: return "IDLE";
    case AgentMode::kIntervention: return "INTERVENTION";
    case AgentMode::kCaution: return "CAUTION";
    case AgentMode::kReturn: return "RETURN";
  }
  return "?";
}

void FsmConfig::validate() const {
  if (!(eta > 0 && eta < 1)) throw InputError("fsm: eta must be in (0, 1)");
  if (!(caution_dwell >= 0)) throw InputError("fsm: caution dwell must be >= 0");
}

AgentState fsm_step(const AgentState& s, const FsmInput& in, const FsmConfig& cfg) {
  if (!in.approach.empty() && in.approach.size() != in.p_ac.size()) {
    throw InputError("fsm: approach and p_ac sizes differ");
  }
  const bool threat = std::any_of(in.p_ac.begin(), in.p_ac.end(),
                                  [&](double p) { return p >= cfg.eta; });
  const bool receding = std::all_of(in.approach.begin(), in.approach.end(),
                                    [](double d) { return d >= 0.0; });
  AgentState n = s;
  switch (s.mode) {
    case AgentMode::kIdle:
      if (threat) n.mode = AgentMode::kIntervention;
      break;
    case AgentMode::kIntervention:
      if (!threat && receding) {
        n.mode = AgentMode::kCaution;
        n.caution_since = in.t;
      }
      break;
    case AgentMode::kCaution:
      if (threat) n.mode = AgentMode::kIntervention;
      else if (in.t - s.caution_since > cfg.caution_dwell) n.mode = AgentMode::kReturn;
      break;
    case AgentMode::kReturn:
      if (threat) n.mode = AgentMode::kIntervention;
      else if (in.at_home) n.mode = AgentMode::kIdle;
      break;
  }
  return n;
}

}  // namespace omnisafe
