#include "cpn/algebra.hpp"

#include <algorithm>
#include <set>

namespace cpn {

NetFormula NetFormula::lit(StructuralUnit unit) { return {UnitLit{std::move(unit)}}; }

NetFormula NetFormula::pfuse(std::vector<NetFormula> operands, std::optional<std::string> at) {
  return {Fuse{FuseKind::P, std::move(at), std::move(operands)}};
}

NetFormula NetFormula::tfuse(std::vector<NetFormula> operands, std::optional<std::string> at) {
  return {Fuse{FuseKind::T, std::move(at), std::move(operands)}};
}

NetFormula NetFormula::wfuse(StructuralUnit unit, int n) {
  Fuse f{FuseKind::W, {}, {}};
  f.operands.reserve(static_cast<size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) f.operands.push_back(lit(unit));
  return {std::move(f)};
}

NetFormula NetFormula::compose(std::vector<NetFormula> operands) {
  return {Compose{std::move(operands)}};
}

namespace {

PetriNet fuse_fragments(const std::vector<PetriNet>& fragments, const std::string& at,
                        bool position) {
  if (fragments.empty()) throw Error(ErrorCode::ArityError, "fusion needs at least one fragment");
  for (size_t i = 0; i < fragments.size(); ++i) {
    bool present = position ? fragments[i].has_position(at) : fragments[i].has_transition(at);
    if (!present)
      throw Error(ErrorCode::FusionTargetMissing,
                  "fragment " + std::to_string(i) + " has no " +
                      (position ? "position '" : "transition '") + at + "'");
  }
  PetriNet result;
  for (const PetriNet& f : fragments) result.absorb(f);
  return result;
}

}  // namespace

PetriNet pf(const std::vector<PetriNet>& fragments, const std::string& at) {
  return fuse_fragments(fragments, at, true);
}

PetriNet tf(const std::vector<PetriNet>& fragments, const std::string& at) {
  return fuse_fragments(fragments, at, false);
}

PetriNet wf(const StructuralUnit& unit, int n) {
  if (n < 2) throw Error(ErrorCode::ArityError, "whole-fusion needs n >= 2");
  StructuralUnit scaled = unit;
  scaled.multiplicity = unit.multiplicity * n;
  PetriNet net;
  net.add_unit(scaled);
  return net;
}

namespace {

// The fusion target when the formula leaves it implicit: the unique node of
// the right kind present in every operand.
std::string infer_target(const std::vector<PetriNet>& nets, bool position) {
  std::set<std::string> shared;
  for (size_t i = 0; i < nets.size(); ++i) {
    std::set<std::string> ids;
    if (position)
      for (const auto& [id, m] : nets[i].positions()) { (void)m; ids.insert(id); }
    else
      for (const auto& [id, t] : nets[i].transitions()) { (void)t; ids.insert(id); }
    if (i == 0) {
      shared = std::move(ids);
    } else {
      std::set<std::string> next;
      std::set_intersection(shared.begin(), shared.end(), ids.begin(), ids.end(),
                            std::inserter(next, next.begin()));
      shared = std::move(next);
    }
  }
  if (shared.size() != 1)
    throw Error(ErrorCode::FusionTargetMissing,
                shared.empty() ? std::string("operands share no fusion target")
                               : std::string("fusion target is ambiguous"));
  return *shared.begin();
}

}  // namespace

PetriNet build(const NetFormula& formula) {
  return std::visit(
      [](const auto& node) -> PetriNet {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, NetFormula::UnitLit>) {
          PetriNet net;
          net.add_unit(node.unit);
          return net;
        } else if constexpr (std::is_same_v<T, NetFormula::Fuse>) {
          if (node.kind == FuseKind::W) {
            if (node.operands.size() < 2)
              throw Error(ErrorCode::ArityError, "whole-fusion needs n >= 2");
            const auto* first = std::get_if<NetFormula::UnitLit>(&node.operands.front().node);
            if (first == nullptr)
              throw Error(ErrorCode::ArityError, "whole-fusion operands must be unit literals");
            for (const NetFormula& op : node.operands) {
              const auto* lit = std::get_if<NetFormula::UnitLit>(&op.node);
              if (lit == nullptr || lit->unit != first->unit)
                throw Error(ErrorCode::ArityError,
                            "whole-fusion operands must all be the same unit");
            }
            return wf(first->unit, static_cast<int>(node.operands.size()));
          }
          std::vector<PetriNet> nets;
          nets.reserve(node.operands.size());
          for (const NetFormula& op : node.operands) nets.push_back(build(op));
          bool position = node.kind == FuseKind::P;
          std::string at = node.at ? *node.at : infer_target(nets, position);
          return position ? pf(nets, at) : tf(nets, at);
        } else {
          static_assert(std::is_same_v<T, NetFormula::Compose>);
          PetriNet net;
          for (const NetFormula& op : node.operands) net.absorb(build(op));
          return net;
        }
      },
      formula.node);
}

std::vector<StructuralUnit> DefusionResult::units() const {
  std::vector<StructuralUnit> out;
  out.reserve(unit_fragments.size());
  for (const PetriNet& f : unit_fragments) {
    if (f.arcs().size() == 1) out.push_back(f.arcs().front().unit());
  }
  return out;
}

namespace {

// Single-unit fragment carrying the endpoint annotations of the source net.
PetriNet unit_fragment(const PetriNet& net, const PetriNet::Arc& arc) {
  PetriNet f;
  f.add_unit(arc.unit());
  f.set_marking(arc.position, net.marking(arc.position));
  const Transition& t = net.transition_info(arc.transition);
  f.set_speed(arc.transition, t.speed);
  f.set_delay(arc.transition, t.delay);
  f.set_delay_counter(arc.transition, t.delay_counter);
  return f;
}

}  // namespace

DefusionResult defuse(const PetriNet& net, const std::optional<std::string>& at) {
  DefusionResult result;
  if (!at) {
    for (const PetriNet::Arc& arc : net.arcs()) {
      result.unit_fragments.push_back(unit_fragment(net, arc));
    }
    // Isolated positions have no unit to live in; keep them as degenerate
    // fragments so rebuilding restores the whole net.
    for (const auto& [id, tokens] : net.positions()) {
      bool incident = false;
      for (const auto& a : net.arcs())
        if (a.position == id) { incident = true; break; }
      if (!incident) {
        PetriNet f;
        f.set_marking(id, tokens);
        result.unit_fragments.push_back(std::move(f));
      }
    }
    return result;
  }

  if (!net.has_node(*at)) throw Error(ErrorCode::UnknownNode, "no node named '" + *at + "'");
  bool at_position = net.has_position(*at);
  std::vector<StructuralUnit> split;
  for (const PetriNet::Arc& arc : net.arcs()) {
    bool outgoing = at_position ? (arc.position == *at && arc.position_to_transition())
                                : (arc.transition == *at && !arc.position_to_transition());
    if (outgoing) {
      result.unit_fragments.push_back(unit_fragment(net, arc));
      split.push_back(arc.unit());
    }
  }
  PetriNet rest = net;
  if (!split.empty()) rest.remove_complex(split);
  if (!rest.empty()) result.residual = std::move(rest);
  return result;
}

PetriNet rebuild(const DefusionResult& parts) {
  PetriNet net;
  if (parts.residual) net.absorb(*parts.residual);
  for (const PetriNet& f : parts.unit_fragments) net.absorb(f);
  return net;
}

}  // namespace cpn
