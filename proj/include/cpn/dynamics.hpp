#pragma once

#include <functional>

#include "cpn/creative.hpp"

namespace cpn {

enum class StepMode { Greedy, Sequential };

struct TraceEvent {
  int step = 0;
  std::map<std::string, int> fired;  // transition -> firing count (>= 1)
  std::vector<int> triggered_rules;
  std::vector<StructuralUnit> spawned;
  std::vector<StructuralUnit> removed;
  std::vector<RuleWarning> warnings;
  std::map<std::string, int> marking;  // post-step snapshot
  std::map<std::string, int> delay_counters;  // present only when some delay > 0
  bool quiescent = false;
};

struct RunResult {
  PetriNet net;
  std::vector<TraceEvent> trace;
};

using StepObserver = std::function<void(const PetriNet&, const TraceEvent&)>;

// Firings transition `t` can perform against the current marking: 0 when any
// normal input has m < max(w, k), any associative gate has m < k or any
// inhibitor gate has m >= k; otherwise min over normal inputs of floor(m/w),
// capped at the speed. A gated transition with no normal inputs yields the
// speed (source transition).
int enabled_count(const PetriNet& net, const std::string& transition);

// One synchronous step: transitions in ascending id order, each non-frozen
// transition with its delay satisfied fires enabled_count times (computed at
// its turn). The delay counter advances while the transition stays enabled
// and resets when it is disabled; frozen transitions are left untouched.
std::map<std::string, int> step_fire(PetriNet& net, const std::set<std::string>& frozen = {});

// The step loop: creative phase first, then firing (Sequential skips firing
// on steps where a rule triggered; Greedy fires around the frozen region).
// Stops early when a step fires nothing, triggers nothing and changes
// nothing, marking the final event quiescent.
RunResult run(PetriNet net, const std::vector<CreativeRule>& rules, int steps, StepMode mode,
              const StepObserver& observer = {});

}  // namespace cpn
