#include "cpn/creative.hpp"

#include <algorithm>

namespace cpn {

std::string_view comparator_text(Comparator cmp) {
  switch (cmp) {
    case Comparator::Lt: return "<";
    case Comparator::Le: return "<=";
    case Comparator::Eq: return "==";
    case Comparator::Ge: return ">=";
    case Comparator::Gt: return ">";
  }
  return "?";
}

bool eval_condition(const Condition& c, const PetriNet& net) {
  long long sum = 0;
  for (const ConditionTerm& term : c.terms) {
    long long value;
    if (term.speed) {
      value = net.transition_info(term.node).speed;  // UnknownNode when missing
    } else {
      value = net.marking(term.node);
    }
    sum += static_cast<long long>(term.coefficient) * value;
  }
  switch (c.cmp) {
    case Comparator::Lt: return sum < c.threshold;
    case Comparator::Le: return sum <= c.threshold;
    case Comparator::Eq: return sum == c.threshold;
    case Comparator::Ge: return sum >= c.threshold;
    case Comparator::Gt: return sum > c.threshold;
  }
  return false;
}

namespace {

void withdraw(PetriNet& net, const std::map<std::string, int>& cost, const char* what) {
  for (const auto& [id, amount] : cost) {
    if (!net.has_position(id))
      throw Error(ErrorCode::UnknownNode, std::string(what) + " position missing: '" + id + "'");
    if (net.marking(id) < amount)
      throw Error(ErrorCode::InsufficientTokens,
                  std::string(what) + " of " + std::to_string(amount) + " unpayable from '" + id +
                      "' (marking " + std::to_string(net.marking(id)) + ")");
  }
  for (const auto& [id, amount] : cost) net.add_tokens(id, -amount);
}

}  // namespace

void apply_spawn(PetriNet& net, const CreativeRule& rule) {
  PetriNet candidate = net;
  // Init targets must be new to the net at spawn time.
  for (const auto& [id, amount] : rule.init) {
    (void)amount;
    if (candidate.has_node(id))
      throw Error(ErrorCode::NamespaceClash, "init target already exists in the net: '" + id + "'");
  }
  withdraw(candidate, rule.cost, "cost");
  for (const StructuralUnit& u : rule.complex) candidate.add_unit(u);
  for (const auto& [id, amount] : rule.init) {
    if (!candidate.has_position(id))
      throw Error(ErrorCode::UnknownNode,
                  "init target not created by the spawned complex: '" + id + "'");
    candidate.set_marking(id, amount);
  }
  net = std::move(candidate);
}

namespace {

// Receiver for the tokens of removed position `pos`: the unique surviving
// position one step against/along arc direction through the transitions of
// the deleted units incident to it. Normal arcs only; gates carry no flow.
std::string nearest_receiver(const PetriNet& before, const std::vector<StructuralUnit>& complex,
                             const std::string& pos, bool predecessor,
                             const std::set<std::string>& removed_positions) {
  std::set<std::string> through;
  for (const StructuralUnit& u : complex)
    if (u.position == pos) through.insert(u.transition);
  std::set<std::string> candidates;
  for (const auto& arc : before.arcs()) {
    if (arc.kind != (predecessor ? UnitKind::C : UnitKind::I)) continue;
    if (!through.count(arc.transition)) continue;
    if (arc.position == pos || removed_positions.count(arc.position)) continue;
    candidates.insert(arc.position);
  }
  if (candidates.size() != 1)
    throw Error(ErrorCode::ParameterConflict,
                std::string(predecessor ? "nearest_predecessor" : "nearest_successor") +
                    " of '" + pos + "' is not unique (" + std::to_string(candidates.size()) +
                    " candidates)");
  return *candidates.begin();
}

}  // namespace

void apply_remove(PetriNet& net, const CreativeRule& rule) {
  PetriNet candidate = net;
  PetriNet::RemovedNodes gone = candidate.remove_complex(rule.complex);

  long long pool = 0;
  for (const auto& [id, tokens] : gone.positions) {
    (void)id;
    pool += tokens;
  }

  switch (rule.release.mode) {
    case ReleaseMode::None:
      // Options 1 and 2: removed tokens are destroyed; option 2 additionally
      // withdraws the deletion cost from the survivors.
      withdraw(candidate, rule.cost, "deletion cost");
      break;
    case ReleaseMode::Explicit: {
      for (const ReleaseShare& share : rule.release.shares) {
        if (!candidate.has_position(share.position))
          throw Error(ErrorCode::UnknownNode,
                      "release target missing or removed: '" + share.position + "'");
      }
      if (rule.release.shares.size() == 1 && rule.release.shares.front().all) {
        candidate.add_tokens(rule.release.shares.front().position, static_cast<int>(pool));
      } else {
        long long total_ratio = 0;
        for (const ReleaseShare& share : rule.release.shares) total_ratio += share.ratio;
        long long distributed = 0;
        std::vector<long long> amounts;
        for (const ReleaseShare& share : rule.release.shares) {
          long long part = pool * share.ratio / total_ratio;
          amounts.push_back(part);
          distributed += part;
        }
        amounts.front() += pool - distributed;  // remainder to the first-listed target
        for (size_t i = 0; i < amounts.size(); ++i)
          candidate.add_tokens(rule.release.shares[i].position, static_cast<int>(amounts[i]));
      }
      break;
    }
    case ReleaseMode::NearestPredecessor:
    case ReleaseMode::NearestSuccessor: {
      bool predecessor = rule.release.mode == ReleaseMode::NearestPredecessor;
      std::set<std::string> removed_positions;
      for (const auto& [id, tokens] : gone.positions) {
        (void)tokens;
        removed_positions.insert(id);
      }
      for (const auto& [id, tokens] : gone.positions) {
        if (tokens == 0) continue;
        std::string receiver = nearest_receiver(net, rule.complex, id, predecessor,
                                                removed_positions);
        if (!candidate.has_position(receiver))
          throw Error(ErrorCode::UnknownNode, "release receiver missing: '" + receiver + "'");
        candidate.add_tokens(receiver, tokens);
      }
      break;
    }
  }
  net = std::move(candidate);
}

PhaseResult creative_phase(PetriNet& net, const std::vector<CreativeRule>& rules) {
  PhaseResult result;
  for (size_t i = 0; i < rules.size(); ++i) {
    const CreativeRule& rule = rules[i];
    bool hold;
    try {
      hold = eval_condition(rule.condition, net);
    } catch (const Error& e) {
      result.warnings.push_back({static_cast<int>(i), std::string("condition skipped: ") + e.what()});
      continue;
    }
    if (!hold) continue;
    result.triggered.push_back(static_cast<int>(i));
    try {
      if (rule.action == RuleAction::Spawn) {
        apply_spawn(net, rule);
        for (const StructuralUnit& u : rule.complex) {
          result.spawned.push_back(u);
          result.frozen.insert(u.position);
          result.frozen.insert(u.transition);
        }
      } else {
        apply_remove(net, rule);
        for (const StructuralUnit& u : rule.complex) {
          result.removed.push_back(u);
          result.frozen.insert(u.position);
          result.frozen.insert(u.transition);
        }
      }
    } catch (const Error& e) {
      result.warnings.push_back({static_cast<int>(i), e.what()});
    }
  }
  return result;
}

}  // namespace cpn
