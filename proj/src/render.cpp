#include <algorithm>
#include <set>
#include <sstream>

#include "cpn/textio.hpp"

namespace cpn {

namespace {

// One unit followed by the annotations of nodes it introduces, pre-slot node
// first. Annotations are emitted at a node's first canonical occurrence.
void append_group(std::string& out, const PetriNet& net, const PetriNet::Arc& arc,
                  std::set<std::string>& seen) {
  out += arc.unit().text();
  auto position_annos = [&](const std::string& id) {
    if (!seen.insert(id).second) return;
    int m = net.marking(id);
    if (m > 0) out += " m(" + id + ")=" + std::to_string(m);
  };
  auto transition_annos = [&](const std::string& id) {
    if (!seen.insert(id).second) return;
    const Transition& t = net.transition_info(id);
    if (t.speed != 1) out += " v(" + id + ")=" + std::to_string(t.speed);
    if (t.delay != 0) out += " d(" + id + ")=" + std::to_string(t.delay);
  };
  if (arc.kind == UnitKind::I) {
    transition_annos(arc.transition);
    position_annos(arc.position);
  } else {
    position_annos(arc.position);
    transition_annos(arc.transition);
  }
}

std::string render_body(const PetriNet& net) {
  std::string out;
  std::set<std::string> seen;
  bool first = true;
  for (const PetriNet::Arc& arc : net.arcs()) {
    if (!first) out += "  ";
    first = false;
    append_group(out, net, arc, seen);
  }
  // Isolated positions have no unit to ride on; a bare marking annotation
  // keeps them representable (even at zero tokens).
  for (const auto& [id, tokens] : net.positions()) {
    if (seen.count(id)) continue;
    if (!first) out += "  ";
    first = false;
    out += "m(" + id + ")=" + std::to_string(tokens);
  }
  return out;
}

}  // namespace

std::string render_units(const PetriNet& net) { return render_body(net); }

std::string render_rule(const CreativeRule& rule) {
  std::string out = "when ";
  bool first = true;
  for (const ConditionTerm& term : rule.condition.terms) {
    if (!first) out += " + ";
    first = false;
    if (term.coefficient != 1) out += std::to_string(term.coefficient) + "*";
    out += term.speed ? "v(" : "m(";
    out += term.node;
    out += ")";
  }
  out += " ";
  out += comparator_text(rule.condition.cmp);
  out += " " + std::to_string(rule.condition.threshold);
  out += rule.action == RuleAction::Spawn ? " spawn {" : " remove {";
  for (const StructuralUnit& u : rule.complex) out += " " + u.text();
  out += " }";
  auto alloc = [&](const char* name, const std::map<std::string, int>& entries) {
    if (entries.empty()) return;
    out += std::string(" ") + name + " {";
    bool head = true;
    for (const auto& [id, amount] : entries) {
      out += head ? " " : ", ";
      head = false;
      out += id + ":" + std::to_string(amount);
    }
    out += " }";
  };
  alloc("cost", rule.cost);
  alloc("init", rule.init);
  switch (rule.release.mode) {
    case ReleaseMode::None:
      break;
    case ReleaseMode::Explicit: {
      out += " release {";
      bool head = true;
      for (const ReleaseShare& share : rule.release.shares) {
        out += head ? " " : ", ";
        head = false;
        out += share.position + ":" + (share.all ? "all" : std::to_string(share.ratio));
      }
      out += " }";
      break;
    }
    case ReleaseMode::NearestPredecessor:
      out += " release { nearest_predecessor }";
      break;
    case ReleaseMode::NearestSuccessor:
      out += " release { nearest_successor }";
      break;
  }
  return out;
}

std::string render_canonical(const PetriNet& net, const std::vector<CreativeRule>& rules) {
  std::string body = render_body(net);
  std::string out = body.empty() ? "net { }" : "net { " + body + " }";
  if (!rules.empty()) {
    out += "\nrules {\n";
    for (const CreativeRule& rule : rules) out += "  " + render_rule(rule) + "\n";
    out += "}";
  }
  out += "\n";
  return out;
}

namespace {

// Pretty printer: walks forward from entry nodes, consuming units. Fan-out
// brackets the outgoing branches, fan-in brackets the converging chains with
// the shared index after the bracket; a node reached twice (cycles, diamonds)
// is re-mentioned by name and the walk stops there, leaving leftover units to
// further fragments.
class PrettyWriter {
 public:
  explicit PrettyWriter(const PetriNet& net) {
    for (const PetriNet::Arc& arc : net.arcs()) units_.push_back(arc.unit());
    for (const auto& [id, tokens] : net.positions()) {
      (void)tokens;
      bool incident = false;
      for (const auto& a : net.arcs())
        if (a.position == id) { incident = true; break; }
      if (!incident) isolated_.push_back(id);
    }
  }

  std::string write() {
    std::vector<std::string> fragments;
    for (const std::string& id : isolated_) fragments.push_back(id);
    while (consumed_.size() < units_.size()) {
      std::string start = pick_start();
      visited_.clear();
      visited_.insert(start);
      fragments.push_back(from_node("", start));
    }
    std::string out;
    for (size_t i = 0; i < fragments.size(); ++i) {
      if (i) out += " ∘ ";
      out += fragments[i];
    }
    return out;
  }

 private:
  static std::string pre(const StructuralUnit& u) {
    return u.kind == UnitKind::I ? u.transition : u.position;
  }
  static std::string post(const StructuralUnit& u) {
    return u.kind == UnitKind::I ? u.position : u.transition;
  }
  static std::string letter(const StructuralUnit& u) {
    std::string s(1, unit_kind_letter(u.kind));
    if (u.multiplicity > 1) s += "^" + std::to_string(u.multiplicity);
    return s;
  }

  std::vector<size_t> out_units(const std::string& node) const {
    std::vector<size_t> out;
    for (size_t i = 0; i < units_.size(); ++i)
      if (!consumed_.count(i) && pre(units_[i]) == node) out.push_back(i);
    return out;
  }
  std::vector<size_t> in_units(const std::string& node) const {
    std::vector<size_t> out;
    for (size_t i = 0; i < units_.size(); ++i)
      if (!consumed_.count(i) && post(units_[i]) == node) out.push_back(i);
    return out;
  }

  std::string pick_start() const {
    std::string best;
    for (size_t i = 0; i < units_.size(); ++i) {
      if (consumed_.count(i)) continue;
      const std::string& candidate = pre(units_[i]);
      if (!in_units(candidate).empty()) continue;
      if (best.empty() || candidate < best) best = candidate;
    }
    if (best.empty()) {
      for (size_t i = 0; i < units_.size(); ++i)
        if (!consumed_.count(i)) return pre(units_[i]);
    }
    return best;
  }

  // Chain ending with `u`'s letter, rendered backwards from its pre side.
  std::string render_upstream(size_t u) {
    consumed_.insert(u);
    const std::string node = pre(units_[u]);
    std::string base;
    std::vector<size_t> ins = in_units(node);
    if (ins.size() == 1 && !visited_.count(node)) {
      visited_.insert(node);
      base = render_upstream(ins.front());
      base += node;
    } else {
      base = node;
    }
    return base + letter(units_[u]);
  }

  // `acc` ends with a unit letter; we arrived at `node` whose label is not
  // yet printed. Handles fan-in, prints the label, continues forward.
  std::string arrive(std::string acc, const std::string& node) {
    std::vector<size_t> ins = in_units(node);
    if (!ins.empty()) {
      std::string group = "(" + acc + ".";
      for (size_t v : ins) {
        group += ", ";
        group += render_upstream(v);
        group += ".";
      }
      group += ")";
      acc = std::move(group);
    }
    if (visited_.count(node)) return acc + node;
    visited_.insert(node);
    return from_node(std::move(acc), node);
  }

  // `acc` already contains `node`'s context; append the label and whatever
  // hangs off it.
  std::string from_node(std::string acc, const std::string& node) {
    acc += node;
    std::vector<size_t> outs = out_units(node);
    if (outs.empty()) return acc;
    if (outs.size() == 1) {
      size_t u = outs.front();
      consumed_.insert(u);
      acc += letter(units_[u]);
      return arrive(std::move(acc), post(units_[u]));
    }
    acc += "(";
    for (size_t i = 0; i < outs.size(); ++i) {
      size_t u = outs[i];
      consumed_.insert(u);
      if (i) acc += ", ";
      acc += ".";
      acc += arrive(letter(units_[u]), post(units_[u]));
    }
    acc += ")";
    return acc;
  }

  std::vector<StructuralUnit> units_;
  std::vector<std::string> isolated_;
  std::set<size_t> consumed_;
  std::set<std::string> visited_;
};

}  // namespace

std::string render_pretty(const PetriNet& net) { return PrettyWriter(net).write(); }

}  // namespace cpn
