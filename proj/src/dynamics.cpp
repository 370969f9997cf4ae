#include "cpn/dynamics.hpp"

#include <algorithm>
#include <cassert>

namespace cpn {

int enabled_count(const PetriNet& net, const std::string& transition) {
  const Transition& info = net.transition_info(transition);  // UnknownNode when missing
  int count = info.speed;
  for (const PetriNet::Arc& arc : net.arcs()) {
    if (arc.transition != transition) continue;
    int m = net.marking(arc.position);
    switch (arc.kind) {
      case UnitKind::C:
        if (m < std::max(arc.multiplicity, arc.effective_threshold())) return 0;
        count = std::min(count, m / arc.multiplicity);
        break;
      case UnitKind::B:
        if (m >= arc.effective_threshold()) return 0;
        break;
      case UnitKind::A:
        if (m < arc.effective_threshold()) return 0;
        break;
      case UnitKind::I:
        break;
    }
  }
  return count;
}

namespace {

bool incident_to_frozen(const PetriNet& net, const std::string& transition,
                        const std::set<std::string>& frozen) {
  if (frozen.empty()) return false;
  if (frozen.count(transition)) return true;
  for (const PetriNet::Arc& arc : net.arcs())
    if (arc.transition == transition && frozen.count(arc.position)) return true;
  return false;
}

struct FireOutcome {
  std::map<std::string, int> fired;
  bool counters_changed = false;
};

FireOutcome fire_step(PetriNet& net, const std::set<std::string>& frozen) {
  FireOutcome out;
  // Ascending id order; std::map iteration gives it directly. Ids are
  // collected first because firing never adds or removes transitions.
  std::vector<std::string> order;
  order.reserve(net.transitions().size());
  for (const auto& [id, info] : net.transitions()) {
    (void)info;
    order.push_back(id);
  }
  for (const std::string& id : order) {
    if (incident_to_frozen(net, id, frozen)) continue;
    int n = enabled_count(net, id);
    const Transition& info = net.transition_info(id);
    if (n == 0) {
      if (info.delay_counter != 0) {
        net.set_delay_counter(id, 0);
        out.counters_changed = true;
      }
      continue;
    }
    if (info.delay_counter < info.delay) {
      net.set_delay_counter(id, info.delay_counter + 1);
      out.counters_changed = true;
      continue;
    }
    for (const PetriNet::Arc& arc : net.arcs()) {
      if (arc.transition != id) continue;
      if (arc.kind == UnitKind::C) {
        net.add_tokens(arc.position, -n * arc.multiplicity);
        assert(net.marking(arc.position) >= 0);
      } else if (arc.kind == UnitKind::I) {
        net.add_tokens(arc.position, n * arc.multiplicity);
      }
    }
    out.fired[id] = n;
  }
  return out;
}

}  // namespace

std::map<std::string, int> step_fire(PetriNet& net, const std::set<std::string>& frozen) {
  return fire_step(net, frozen).fired;
}

RunResult run(PetriNet net, const std::vector<CreativeRule>& rules, int steps, StepMode mode,
              const StepObserver& observer) {
  if (steps < 0) throw std::invalid_argument("steps must be >= 0");
  RunResult result{std::move(net), {}};
  bool track_counters = false;
  for (int step = 1; step <= steps; ++step) {
    PhaseResult phase;
    if (!rules.empty()) phase = creative_phase(result.net, rules);
    bool creative = !phase.triggered.empty();

    FireOutcome outcome;
    if (!(mode == StepMode::Sequential && creative))
      outcome = fire_step(result.net, creative ? phase.frozen : std::set<std::string>{});

    TraceEvent event;
    event.step = step;
    event.fired = std::move(outcome.fired);
    event.triggered_rules = std::move(phase.triggered);
    event.spawned = std::move(phase.spawned);
    event.removed = std::move(phase.removed);
    event.warnings = std::move(phase.warnings);
    event.marking = result.net.positions();
    for (const auto& [id, info] : result.net.transitions())
      if (info.delay > 0) track_counters = true;
    if (track_counters)
      for (const auto& [id, info] : result.net.transitions())
        event.delay_counters[id] = info.delay_counter;
    event.quiescent = event.fired.empty() && event.triggered_rules.empty() &&
                      !outcome.counters_changed;

    if (observer) observer(result.net, event);
    result.trace.push_back(std::move(event));
    if (result.trace.back().quiescent) break;
  }
  return result;
}

}  // namespace cpn
