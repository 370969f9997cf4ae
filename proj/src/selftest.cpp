#include "cpn/selftest.hpp"

#include <algorithm>

#include "cpn/algebra.hpp"

namespace cpn::selftest {

namespace {

int pick(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool chance(std::mt19937_64& rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

const char* kPositions[] = {"p0", "p1", "p2", "p3", "p4", "p5"};
const char* kTransitions[] = {"t0", "t1", "t2", "t3", "t4", "t5"};
const char* kFresh[] = {"f0", "f1", "f2", "f3"};
const char* kFreshTrans[] = {"g0", "g1", "g2", "g3"};

void record(SuiteReport& report, const std::string& what) {
  ++report.failures;
  if (report.samples.size() < 5) report.samples.push_back(what);
}

}  // namespace

PetriNet random_net(std::mt19937_64& rng) {
  PetriNet net;
  int arcs = pick(rng, 0, 10);
  int np = pick(rng, 1, 6), nt = pick(rng, 1, 6);
  for (int i = 0; i < arcs; ++i) {
    StructuralUnit u;
    u.kind = static_cast<UnitKind>(pick(rng, 0, 3));
    u.position = kPositions[pick(rng, 0, np - 1)];
    u.transition = kTransitions[pick(rng, 0, nt - 1)];
    u.multiplicity = chance(rng, 0.3) ? 2 : 1;
    if (chance(rng, 0.25)) u.threshold = pick(rng, 1, 3);
    try {
      net.add_unit(u);
    } catch (const Error&) {
      // Threshold disagreement with an earlier identical arc; drop it.
    }
  }
  for (const auto& [id, tokens] : net.positions()) {
    (void)tokens;
    if (chance(rng, 0.6)) net.set_marking(id, pick(rng, 0, 9));
  }
  for (const auto& [id, info] : net.transitions()) {
    (void)info;
    if (chance(rng, 0.2)) net.set_speed(id, pick(rng, 2, 3));
    if (chance(rng, 0.15)) net.set_delay(id, pick(rng, 1, 2));
  }
  if (chance(rng, 0.12)) net.set_marking("z0", pick(rng, 0, 9));
  return net;
}

namespace {

Condition random_condition(std::mt19937_64& rng, const PetriNet& net) {
  Condition cond;
  std::vector<std::string> positions;
  for (const auto& [id, m] : net.positions()) { (void)m; positions.push_back(id); }
  int terms = chance(rng, 0.25) ? 2 : 1;
  for (int i = 0; i < terms; ++i) {
    ConditionTerm term;
    term.coefficient = pick(rng, 1, 2);
    if (chance(rng, 0.1) || positions.empty()) {
      // Sometimes reference a node that may not exist; exercises the
      // skip-with-warning path.
      term.speed = chance(rng, 0.5);
      term.node = chance(rng, 0.5) ? "q9" : kPositions[pick(rng, 0, 5)];
    } else if (chance(rng, 0.15) && !net.transitions().empty()) {
      term.speed = true;
      auto it = net.transitions().begin();
      std::advance(it, pick(rng, 0, static_cast<int>(net.transitions().size()) - 1));
      term.node = it->first;
    } else {
      term.node = positions[pick(rng, 0, static_cast<int>(positions.size()) - 1)];
    }
    cond.terms.push_back(std::move(term));
  }
  cond.cmp = static_cast<Comparator>(pick(rng, 0, 4));
  // Bias towards conditions that hold so rules actually apply.
  if (chance(rng, 0.6)) {
    long long sum = 0;
    bool known = true;
    for (const ConditionTerm& t : cond.terms) {
      if (t.speed ? !net.has_transition(t.node) : !net.has_position(t.node)) {
        known = false;
        break;
      }
      sum += t.coefficient *
             (t.speed ? net.transition_info(t.node).speed : net.marking(t.node));
    }
    if (known) {
      cond.cmp = Comparator::Ge;
      cond.threshold = std::max<long long>(0, sum - pick(rng, 0, 2));
    }
  } else {
    cond.threshold = pick(rng, 0, 10);
  }
  return cond;
}

std::vector<StructuralUnit> random_spawn_complex(std::mt19937_64& rng, const PetriNet& net) {
  std::vector<StructuralUnit> complex;
  int n = pick(rng, 1, 3);
  std::vector<std::string> positions, transitions;
  for (const auto& [id, m] : net.positions()) { (void)m; positions.push_back(id); }
  for (const auto& [id, t] : net.transitions()) { (void)t; transitions.push_back(id); }
  for (int i = 0; i < n; ++i) {
    StructuralUnit u;
    u.kind = static_cast<UnitKind>(pick(rng, 0, 3));
    bool attach = !positions.empty() && chance(rng, 0.6);
    u.position = attach ? positions[pick(rng, 0, static_cast<int>(positions.size()) - 1)]
                        : kFresh[pick(rng, 0, 3)];
    bool attach_t = !transitions.empty() && chance(rng, 0.4);
    u.transition = attach_t ? transitions[pick(rng, 0, static_cast<int>(transitions.size()) - 1)]
                            : kFreshTrans[pick(rng, 0, 3)];
    u.multiplicity = chance(rng, 0.2) ? 2 : 1;
    complex.push_back(std::move(u));
  }
  return complex;
}

std::vector<StructuralUnit> random_remove_complex(std::mt19937_64& rng, const PetriNet& net) {
  std::vector<StructuralUnit> complex;
  std::vector<StructuralUnit> present = net.units();
  if (present.empty() || chance(rng, 0.15)) {
    // A unit that is usually absent; exercises skip-with-warning.
    complex.push_back(c_unit(kPositions[pick(rng, 0, 5)], kFreshTrans[pick(rng, 0, 3)]));
    return complex;
  }
  int n = pick(rng, 1, std::min<int>(2, static_cast<int>(present.size())));
  for (int i = 0; i < n; ++i) {
    StructuralUnit u = present[pick(rng, 0, static_cast<int>(present.size()) - 1)];
    if (u.multiplicity > 1 && chance(rng, 0.5)) u.multiplicity = 1;
    u.threshold.reset();
    complex.push_back(std::move(u));
  }
  return complex;
}

}  // namespace

// category 0: free spawns; 1: cost+init spawns; 2: removals with release;
// 3: mixed remove-release + costed spawns; 4: free removals.
std::vector<CreativeRule> random_rules(std::mt19937_64& rng, const PetriNet& net, int category) {
  std::vector<CreativeRule> rules;
  int count = pick(rng, 1, 3);
  for (int r = 0; r < count; ++r) {
    CreativeRule rule;
    rule.condition = random_condition(rng, net);
    bool spawn;
    switch (category) {
      case 0:
      case 1: spawn = true; break;
      case 2:
      case 4: spawn = false; break;
      default: spawn = chance(rng, 0.5); break;
    }
    if (spawn) {
      rule.action = RuleAction::Spawn;
      rule.complex = random_spawn_complex(rng, net);
      if (category == 1 || category == 3) {
        std::vector<std::string> positions;
        for (const auto& [id, m] : net.positions()) { (void)m; positions.push_back(id); }
        if (!positions.empty()) {
          int sources = pick(rng, 1, std::min<int>(2, static_cast<int>(positions.size())));
          for (int i = 0; i < sources; ++i)
            rule.cost[positions[pick(rng, 0, static_cast<int>(positions.size()) - 1)]] =
                pick(rng, 1, 3);
        }
        if (category == 1 && !rule.cost.empty()) {
          long long cost_total = 0;
          for (const auto& [id, v] : rule.cost) { (void)id; cost_total += v; }
          std::vector<std::string> fresh;
          for (const StructuralUnit& u : rule.complex)
            if (!net.has_node(u.position) && u.position[0] == 'f') fresh.push_back(u.position);
          std::sort(fresh.begin(), fresh.end());
          fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
          long long budget = pick(rng, 0, static_cast<int>(cost_total));
          for (const std::string& id : fresh) {
            if (budget <= 0) break;
            int amount = pick(rng, 1, static_cast<int>(budget));
            rule.init[id] = amount;
            budget -= amount;
          }
        }
      }
    } else {
      rule.action = RuleAction::Remove;
      rule.complex = random_remove_complex(rng, net);
      if (category == 4 && chance(rng, 0.5)) {
        // Deletion option 2: a cost withdrawn from surviving positions.
        std::vector<std::string> positions;
        for (const auto& [id, m] : net.positions()) { (void)m; positions.push_back(id); }
        if (!positions.empty())
          rule.cost[positions[pick(rng, 0, static_cast<int>(positions.size()) - 1)]] =
              pick(rng, 1, 2);
      }
      if (category == 2 || category == 3) {
        std::vector<std::string> positions;
        for (const auto& [id, m] : net.positions()) { (void)m; positions.push_back(id); }
        switch (positions.empty() ? 2 : pick(rng, 0, 3)) {
          case 0: {
            rule.release.mode = ReleaseMode::Explicit;
            ReleaseShare share;
            share.position = positions[pick(rng, 0, static_cast<int>(positions.size()) - 1)];
            share.all = true;
            rule.release.shares.push_back(std::move(share));
            break;
          }
          case 1: {
            rule.release.mode = ReleaseMode::Explicit;
            int targets = std::min<int>(2, static_cast<int>(positions.size()));
            std::set<std::string> used;
            for (int i = 0; i < targets; ++i) {
              ReleaseShare share;
              share.position = positions[pick(rng, 0, static_cast<int>(positions.size()) - 1)];
              if (!used.insert(share.position).second) continue;
              share.ratio = pick(rng, 1, 3);
              rule.release.shares.push_back(std::move(share));
            }
            break;
          }
          case 2:
            rule.release.mode = ReleaseMode::NearestPredecessor;
            break;
          default:
            rule.release.mode = ReleaseMode::NearestSuccessor;
            break;
        }
        if (rule.release.mode == ReleaseMode::Explicit && rule.release.shares.empty())
          rule.release.mode = ReleaseMode::NearestSuccessor;
      }
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

SuiteReport roundtrip_dsl(long long iterations, std::uint64_t seed) {
  SuiteReport report{"roundtrip-dsl", 0, 0, {}};
  std::mt19937_64 rng(seed);
  for (long long i = 0; i < iterations; ++i) {
    ++report.cases;
    PetriNet net = random_net(rng);
    std::vector<CreativeRule> rules;
    if (chance(rng, 0.4)) rules = random_rules(rng, net, pick(rng, 0, 4));
    std::string text = render_canonical(net, rules);
    ParseResult parsed = parse_net(text);
    if (!parsed.ok()) {
      record(report, "render did not re-parse: " + text);
      continue;
    }
    if (!labeled_equal(parsed.document->net, net)) {
      record(report, "net changed across the round trip: " + text);
      continue;
    }
    std::string again = render_canonical(parsed.document->net, parsed.document->rules);
    if (again != text) record(report, "canonical render is not a fixpoint: " + text);
  }
  return report;
}

SuiteReport roundtrip_defusion(long long iterations, std::uint64_t seed) {
  SuiteReport report{"roundtrip-defusion", 0, 0, {}};
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  for (long long i = 0; i < iterations; ++i) {
    ++report.cases;
    PetriNet net = random_net(rng);
    DefusionResult full = defuse(net);
    if (!labeled_equal(rebuild(full), net)) {
      record(report, "full defusion round trip failed: " + render_canonical(net));
      continue;
    }
    if (total_tokens(rebuild(full)) != total_tokens(net)) {
      record(report, "defusion changed the token total: " + render_canonical(net));
      continue;
    }
    std::vector<std::string> nodes;
    for (const auto& [id, m] : net.positions()) { (void)m; nodes.push_back(id); }
    for (const auto& [id, t] : net.transitions()) { (void)t; nodes.push_back(id); }
    if (nodes.empty()) continue;
    const std::string& at = nodes[pick(rng, 0, static_cast<int>(nodes.size()) - 1)];
    DefusionResult partial = defuse(net, at);
    if (!labeled_equal(rebuild(partial), net))
      record(report, "partial defusion at '" + at + "' failed: " + render_canonical(net));
  }
  return report;
}

SuiteReport conservation(long long iterations, std::uint64_t seed) {
  SuiteReport report{"conservation", 0, 0, {}};
  std::mt19937_64 rng(seed ^ 0xc2b2ae3d27d4eb4full);
  for (long long i = 0; i < iterations; ++i) {
    ++report.cases;
    int category = static_cast<int>(i % 5);
    PetriNet net = random_net(rng);
    std::vector<CreativeRule> rules = random_rules(rng, net, category);
    // Free/costed removals destroy tokens at removal time; keep those phases
    // single-rule so the destroyed amount is observable from the before/after
    // position sets alone.
    if (category == 4 && rules.size() > 1) rules.resize(1);
    PetriNet before = net;
    long long total_before = total_tokens(net);
    PhaseResult phase = creative_phase(net, rules);

    try {
      validate(net);
    } catch (const Error& e) {
      record(report, std::string("net invalid after phase: ") + e.what());
      continue;
    }

    // Applied rules are the triggered ones that produced no warning.
    std::set<int> warned;
    for (const RuleWarning& w : phase.warnings) warned.insert(w.rule);
    long long cost_spawned = 0, init_spawned = 0, removal_cost = 0;
    for (int idx : phase.triggered) {
      if (warned.count(idx)) continue;
      const CreativeRule& rule = rules[static_cast<size_t>(idx)];
      if (rule.action == RuleAction::Spawn) {
        for (const auto& [id, v] : rule.cost) { (void)id; cost_spawned += v; }
        for (const auto& [id, v] : rule.init) { (void)id; init_spawned += v; }
      } else if (rule.release.mode == ReleaseMode::None) {
        for (const auto& [id, v] : rule.cost) { (void)id; removal_cost += v; }
      }
    }
    // Tokens destroyed with removed positions, observed from the position
    // sets alone (valid for the single-rule category 4 phases).
    long long destroyed = 0;
    for (const auto& [id, tokens] : before.positions())
      if (!net.has_position(id)) destroyed += tokens;
    long long total_after = total_tokens(net);

    switch (category) {
      case 0:
        if (total_after != total_before)
          record(report, "free spawn phase changed the total");
        break;
      case 1:
        if (total_after != total_before - cost_spawned + init_spawned)
          record(report, "cost/init accounting broken: " + render_canonical(before));
        break;
      case 2:
        // Release moves tokens, never creates them; applied releases move
        // everything the removal freed.
        if (total_after != total_before)
          record(report, "release phase changed the total: " + render_canonical(before));
        break;
      case 3:
        if (total_after != total_before - cost_spawned + init_spawned)
          record(report, "mixed release/spawn accounting broken");
        if (total_after > total_before + init_spawned)
          record(report, "release created tokens");
        break;
      case 4:
        if (total_after != total_before - destroyed - removal_cost)
          record(report, "free removal accounting broken: " + render_canonical(before));
        break;
    }

    // Address-freeness: the same phase applied to an equal net lands equally.
    PetriNet replay = before;
    creative_phase(replay, rules);
    if (!labeled_equal(replay, net)) record(report, "phase is not deterministic");
  }
  return report;
}

namespace {

// Reference token game, straight from the definition: ascending id order,
// a transition fires while its normal inputs hold max(w, k), associative
// gates hold k, inhibitor gates stay below k; one firing consumes w per
// normal input and produces w per output. Only valid for v=1, d=0 nets.
std::map<std::string, int> reference_step(const PetriNet& net,
                                          std::map<std::string, int>& marking) {
  std::map<std::string, int> fired;
  for (const auto& [id, info] : net.transitions()) {
    (void)info;
    bool enabled = true;
    for (const auto& arc : net.arcs()) {
      if (arc.transition != id) continue;
      int m = marking.at(arc.position);
      if (arc.kind == UnitKind::C &&
          m < std::max(arc.multiplicity, arc.effective_threshold()))
        enabled = false;
      if (arc.kind == UnitKind::A && m < arc.effective_threshold()) enabled = false;
      if (arc.kind == UnitKind::B && m >= arc.effective_threshold()) enabled = false;
    }
    if (!enabled) continue;
    for (const auto& arc : net.arcs()) {
      if (arc.transition != id) continue;
      if (arc.kind == UnitKind::C) marking[arc.position] -= arc.multiplicity;
      if (arc.kind == UnitKind::I) marking[arc.position] += arc.multiplicity;
    }
    fired[id] = 1;
  }
  return fired;
}

bool oracle_case(SuiteReport& report, const PetriNet& prototype,
                 const std::map<std::string, int>& marking) {
  ++report.cases;
  PetriNet net = prototype;
  for (const auto& [id, tokens] : marking) net.set_marking(id, tokens);
  std::map<std::string, int> expected_marking = marking;
  std::map<std::string, int> expected_fired = reference_step(prototype, expected_marking);
  std::map<std::string, int> fired = step_fire(net);
  if (fired != expected_fired || net.positions() != expected_marking) {
    record(report, "oracle mismatch on " + render_canonical(prototype));
    return false;
  }
  return true;
}

void enumerate_markings(SuiteReport& report, const PetriNet& prototype,
                        const std::vector<std::string>& positions, size_t index,
                        std::map<std::string, int>& marking) {
  if (index == positions.size()) {
    oracle_case(report, prototype, marking);
    return;
  }
  for (int m = 0; m <= 5; ++m) {
    marking[positions[index]] = m;
    enumerate_markings(report, prototype, positions, index + 1, marking);
  }
}

}  // namespace

SuiteReport firing_oracle(long long random_iterations, std::uint64_t seed) {
  SuiteReport report{"firing-oracle", 0, 0, {}};

  // Exhaustive desk-scale family: every arc-kind assignment over 1..2
  // positions x 1..2 transitions, crossed with every marking in {0..5}^p.
  // PT slots range over {none, C, C^2, B, A}; TP slots over {none, I}.
  const int kPtChoices = 5, kTpChoices = 2;
  for (int np = 1; np <= 2; ++np) {
    for (int nt = 1; nt <= 2; ++nt) {
      int pt_slots = np * nt, tp_slots = np * nt;
      long long pt_total = 1, tp_total = 1;
      for (int s = 0; s < pt_slots; ++s) pt_total *= kPtChoices;
      for (int s = 0; s < tp_slots; ++s) tp_total *= kTpChoices;
      for (long long pt = 0; pt < pt_total; ++pt) {
        for (long long tp = 0; tp < tp_total; ++tp) {
          PetriNet prototype;
          long long pt_code = pt, tp_code = tp;
          for (int p = 0; p < np; ++p) {
            for (int t = 0; t < nt; ++t) {
              int choice = static_cast<int>(pt_code % kPtChoices);
              pt_code /= kPtChoices;
              switch (choice) {
                case 1: prototype.add_unit(c_unit(kPositions[p], kTransitions[t])); break;
                case 2: prototype.add_unit(c_unit(kPositions[p], kTransitions[t], 2)); break;
                case 3: prototype.add_unit(b_unit(kPositions[p], kTransitions[t])); break;
                case 4: prototype.add_unit(a_unit(kPositions[p], kTransitions[t], 1, 2)); break;
                default: break;
              }
              int out = static_cast<int>(tp_code % kTpChoices);
              tp_code /= kTpChoices;
              if (out == 1) prototype.add_unit(i_unit(kTransitions[t], kPositions[p]));
            }
          }
          if (static_cast<int>(prototype.transitions().size()) != nt ||
              static_cast<int>(prototype.positions().size()) != np)
            continue;  // a node never materialized; an equivalent smaller case covers it
          std::vector<std::string> positions;
          for (const auto& [id, m] : prototype.positions()) { (void)m; positions.push_back(id); }
          std::map<std::string, int> marking;
          enumerate_markings(report, prototype, positions, 0, marking);
        }
      }
    }
  }

  // Randomized sweep over the full domain: <= 4 positions, <= 3 transitions.
  std::mt19937_64 rng(seed ^ 0xa0761d6478bd642full);
  for (long long i = 0; i < random_iterations; ++i) {
    PetriNet prototype;
    int np = pick(rng, 1, 4), nt = pick(rng, 1, 3);
    int arcs = pick(rng, 1, 8);
    for (int a = 0; a < arcs; ++a) {
      StructuralUnit u;
      u.kind = static_cast<UnitKind>(pick(rng, 0, 3));
      u.position = kPositions[pick(rng, 0, np - 1)];
      u.transition = kTransitions[pick(rng, 0, nt - 1)];
      u.multiplicity = chance(rng, 0.3) ? 2 : 1;
      if (chance(rng, 0.25)) u.threshold = pick(rng, 1, 3);
      try {
        prototype.add_unit(u);
      } catch (const Error&) {
      }
    }
    std::map<std::string, int> marking;
    for (const auto& [id, m] : prototype.positions()) {
      (void)m;
      marking[id] = pick(rng, 0, 5);
    }
    oracle_case(report, prototype, marking);
  }
  return report;
}

std::vector<SuiteReport> run_all(long long iterations, std::uint64_t seed) {
  return {
      roundtrip_dsl(iterations, seed),
      roundtrip_defusion(iterations, seed),
      conservation(iterations, seed),
      firing_oracle(iterations, seed),
  };
}

}  // namespace cpn::selftest
