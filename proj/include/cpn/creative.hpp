#pragma once

#include <set>

#include "cpn/core.hpp"

namespace cpn {

enum class Comparator { Lt, Le, Eq, Ge, Gt };

std::string_view comparator_text(Comparator cmp);

struct ConditionTerm {
  int coefficient = 1;
  bool speed = false;  // false: m(node), true: v(node)
  std::string node;
};

// Weighted-sum predicate over markings and speeds, e.g. 2*m(a) + m(c) >= 7.
struct Condition {
  std::vector<ConditionTerm> terms;
  Comparator cmp = Comparator::Ge;
  long long threshold = 0;
};

enum class ReleaseMode { None, Explicit, NearestPredecessor, NearestSuccessor };

struct ReleaseShare {
  std::string position;
  bool all = false;  // sole share taking the whole released pool
  int ratio = 1;
};

struct ReleasePolicy {
  ReleaseMode mode = ReleaseMode::None;
  std::vector<ReleaseShare> shares;  // Explicit mode; order fixes the remainder target
};

enum class RuleAction { Spawn, Remove };

// Condition plus structural action. Spawn: cost is withdrawn from existing
// positions, the complex is added under R1, init fills positions the spawn
// created (sum(init) <= sum(cost)). Remove: exactly one of free / cost /
// release governs what happens to the tokens involved.
struct CreativeRule {
  Condition condition;
  RuleAction action = RuleAction::Spawn;
  std::vector<StructuralUnit> complex;
  std::map<std::string, int> cost;
  std::map<std::string, int> init;
  ReleasePolicy release;
};

// Throws UnknownNode when a referenced node is missing (the caller skips the
// rule with a warning; the structure may have been deleted earlier).
bool eval_condition(const Condition& c, const PetriNet& net);

// Both appliers are atomic: on any Error the net is left untouched.
void apply_spawn(PetriNet& net, const CreativeRule& rule);
void apply_remove(PetriNet& net, const CreativeRule& rule);

struct RuleWarning {
  int rule = -1;
  std::string message;
};

struct PhaseResult {
  std::vector<int> triggered;            // rules whose condition held
  std::vector<StructuralUnit> spawned;   // units actually added
  std::vector<StructuralUnit> removed;   // units actually removed
  std::set<std::string> frozen;          // nodes touched by applied changes
  std::vector<RuleWarning> warnings;
};

// Evaluates rules in declaration order against the evolving net: rule i+1
// sees rule i's changes. Per-rule failures become warnings, never aborts.
PhaseResult creative_phase(PetriNet& net, const std::vector<CreativeRule>& rules);

}  // namespace cpn
