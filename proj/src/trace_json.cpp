#include <json.hpp>

#include "cpn/textio.hpp"

namespace cpn {

std::string trace_event_json(const TraceEvent& event) {
  nlohmann::ordered_json j;
  j["step"] = event.step;
  j["fired"] = nlohmann::ordered_json::object();
  for (const auto& [id, count] : event.fired) j["fired"][id] = count;
  j["rules"] = event.triggered_rules;
  j["spawned"] = nlohmann::ordered_json::array();
  for (const StructuralUnit& u : event.spawned) j["spawned"].push_back(u.text());
  j["removed"] = nlohmann::ordered_json::array();
  for (const StructuralUnit& u : event.removed) j["removed"].push_back(u.text());
  j["marking"] = nlohmann::ordered_json::object();
  for (const auto& [id, tokens] : event.marking) j["marking"][id] = tokens;
  if (!event.delay_counters.empty()) {
    j["delay_counters"] = nlohmann::ordered_json::object();
    for (const auto& [id, counter] : event.delay_counters) j["delay_counters"][id] = counter;
  }
  if (event.quiescent) j["quiescent"] = true;
  return j.dump();
}

std::string rule_warning_json(const RuleWarning& warning) {
  nlohmann::ordered_json j;
  j["warning"] = warning.message;
  j["rule"] = warning.rule;
  return j.dump();
}

}  // namespace cpn
