#include "cpn/core.hpp"

#include <algorithm>
#include <cctype>
#include <tuple>

namespace cpn {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NamespaceClash: return "NamespaceClash";
    case ErrorCode::FusionTargetMissing: return "FusionTargetMissing";
    case ErrorCode::MarkingConflict: return "MarkingConflict";
    case ErrorCode::ParameterConflict: return "ParameterConflict";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::InsufficientTokens: return "InsufficientTokens";
    case ErrorCode::InvalidIdentifier: return "InvalidIdentifier";
  }
  return "Error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

char unit_kind_letter(UnitKind kind) {
  switch (kind) {
    case UnitKind::C: return 'C';
    case UnitKind::I: return 'I';
    case UnitKind::B: return 'B';
    case UnitKind::A: return 'A';
  }
  return '?';
}

bool position_to_transition(UnitKind kind) { return kind != UnitKind::I; }

std::string StructuralUnit::text() const {
  std::string s;
  s += unit_kind_letter(kind);
  s += '[';
  if (kind == UnitKind::I) {
    s += transition;
    s += ',';
    s += position;
  } else {
    s += position;
    s += ',';
    s += transition;
  }
  s += ']';
  if (multiplicity > 1) {
    s += '^';
    s += std::to_string(multiplicity);
  }
  if (effective_threshold() != multiplicity) {
    s += " k=";
    s += std::to_string(effective_threshold());
  }
  return s;
}

bool operator==(const StructuralUnit& a, const StructuralUnit& b) {
  return a.kind == b.kind && a.position == b.position && a.transition == b.transition &&
         a.multiplicity == b.multiplicity && a.effective_threshold() == b.effective_threshold();
}

bool operator!=(const StructuralUnit& a, const StructuralUnit& b) { return !(a == b); }

bool canonical_less(const StructuralUnit& a, const StructuralUnit& b) {
  if (a.position != b.position) return a.position < b.position;
  if (a.transition != b.transition) return a.transition < b.transition;
  if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  if (a.multiplicity != b.multiplicity) return a.multiplicity < b.multiplicity;
  return a.effective_threshold() < b.effective_threshold();
}

StructuralUnit c_unit(std::string position, std::string transition, int multiplicity,
                      std::optional<int> threshold) {
  return {UnitKind::C, std::move(position), std::move(transition), multiplicity, threshold};
}

StructuralUnit i_unit(std::string transition, std::string position, int multiplicity,
                      std::optional<int> threshold) {
  return {UnitKind::I, std::move(position), std::move(transition), multiplicity, threshold};
}

StructuralUnit b_unit(std::string position, std::string transition, int multiplicity,
                      std::optional<int> threshold) {
  return {UnitKind::B, std::move(position), std::move(transition), multiplicity, threshold};
}

StructuralUnit a_unit(std::string position, std::string transition, int multiplicity,
                      std::optional<int> threshold) {
  return {UnitKind::A, std::move(position), std::move(transition), multiplicity, threshold};
}

StructuralUnit PetriNet::Arc::unit() const {
  return {kind, position, transition, multiplicity, threshold};
}

namespace {

bool arc_key_less(const PetriNet::Arc& a, const std::string& position,
                  const std::string& transition, UnitKind kind) {
  if (a.position != position) return a.position < position;
  if (a.transition != transition) return a.transition < transition;
  return static_cast<int>(a.kind) < static_cast<int>(kind);
}

}  // namespace

int PetriNet::marking(const std::string& id) const {
  auto it = positions_.find(id);
  if (it == positions_.end()) throw Error(ErrorCode::UnknownNode, "no position named '" + id + "'");
  return it->second;
}

const Transition& PetriNet::transition_info(const std::string& id) const {
  auto it = transitions_.find(id);
  if (it == transitions_.end())
    throw Error(ErrorCode::UnknownNode, "no transition named '" + id + "'");
  return it->second;
}

std::vector<StructuralUnit> PetriNet::units() const {
  std::vector<StructuralUnit> out;
  out.reserve(arcs_.size());
  for (const Arc& a : arcs_) out.push_back(a.unit());
  return out;
}

const PetriNet::Arc* PetriNet::find_arc(UnitKind kind, const std::string& position,
                                        const std::string& transition) const {
  auto it = std::lower_bound(arcs_.begin(), arcs_.end(), nullptr,
                             [&](const Arc& a, std::nullptr_t) {
                               return arc_key_less(a, position, transition, kind);
                             });
  if (it != arcs_.end() && it->position == position && it->transition == transition &&
      it->kind == kind)
    return &*it;
  return nullptr;
}

bool PetriNet::contains_unit(const StructuralUnit& u) const {
  const Arc* a = find_arc(u.kind, u.position, u.transition);
  return a != nullptr && a->multiplicity >= u.multiplicity;
}

void PetriNet::ensure_position(const std::string& id) {
  if (!is_valid_identifier(id))
    throw Error(ErrorCode::InvalidIdentifier, "bad identifier '" + id + "'");
  if (transitions_.count(id))
    throw Error(ErrorCode::NamespaceClash, "'" + id + "' already names a transition");
  positions_.emplace(id, 0);
}

void PetriNet::ensure_transition(const std::string& id) {
  if (!is_valid_identifier(id))
    throw Error(ErrorCode::InvalidIdentifier, "bad identifier '" + id + "'");
  if (positions_.count(id))
    throw Error(ErrorCode::NamespaceClash, "'" + id + "' already names a position");
  transitions_.emplace(id, Transition{});
}

void PetriNet::set_marking(const std::string& id, int tokens) {
  if (tokens < 0) throw std::invalid_argument("marking must be nonnegative");
  ensure_position(id);
  positions_[id] = tokens;
}

void PetriNet::add_tokens(const std::string& id, int delta) {
  auto it = positions_.find(id);
  if (it == positions_.end()) throw Error(ErrorCode::UnknownNode, "no position named '" + id + "'");
  if (it->second + delta < 0) throw std::invalid_argument("marking would become negative");
  it->second += delta;
}

void PetriNet::set_speed(const std::string& id, int speed) {
  if (speed < 1) throw std::invalid_argument("speed must be >= 1");
  auto it = transitions_.find(id);
  if (it == transitions_.end())
    throw Error(ErrorCode::UnknownNode, "no transition named '" + id + "'");
  it->second.speed = speed;
}

void PetriNet::set_delay(const std::string& id, int delay) {
  if (delay < 0) throw std::invalid_argument("delay must be >= 0");
  auto it = transitions_.find(id);
  if (it == transitions_.end())
    throw Error(ErrorCode::UnknownNode, "no transition named '" + id + "'");
  it->second.delay = delay;
  it->second.delay_counter = std::min(it->second.delay_counter, delay);
}

void PetriNet::set_delay_counter(const std::string& id, int counter) {
  auto it = transitions_.find(id);
  if (it == transitions_.end())
    throw Error(ErrorCode::UnknownNode, "no transition named '" + id + "'");
  if (counter < 0 || counter > it->second.delay)
    throw std::invalid_argument("delay counter out of range");
  it->second.delay_counter = counter;
}

void PetriNet::merge_arc(const Arc& arc) {
  auto it = std::lower_bound(arcs_.begin(), arcs_.end(), nullptr,
                             [&](const Arc& a, std::nullptr_t) {
                               return arc_key_less(a, arc.position, arc.transition, arc.kind);
                             });
  if (it != arcs_.end() && it->position == arc.position && it->transition == arc.transition &&
      it->kind == arc.kind) {
    if (it->threshold && arc.threshold && *it->threshold != *arc.threshold)
      throw Error(ErrorCode::ParameterConflict,
                  "thresholds disagree on arc " + it->unit().text() + " (k=" +
                      std::to_string(*it->threshold) + " vs k=" + std::to_string(*arc.threshold) +
                      ")");
    it->multiplicity += arc.multiplicity;
    if (arc.threshold) it->threshold = arc.threshold;
  } else {
    arcs_.insert(it, arc);
  }
}

void PetriNet::add_unit(const StructuralUnit& u) {
  if (u.multiplicity < 1) throw std::invalid_argument("unit multiplicity must be >= 1");
  if (u.threshold && *u.threshold < 1) throw std::invalid_argument("unit threshold must be >= 1");
  if (u.position == u.transition)
    throw Error(ErrorCode::NamespaceClash,
                "'" + u.position + "' used as both position and transition");
  ensure_position(u.position);
  ensure_transition(u.transition);
  merge_arc(Arc{u.position, u.transition, u.kind, u.multiplicity, u.threshold});
}

void PetriNet::absorb(const PetriNet& fragment) {
  for (const auto& [id, tokens] : fragment.positions_) {
    if (transitions_.count(id))
      throw Error(ErrorCode::NamespaceClash, "'" + id + "' already names a transition");
    auto it = positions_.find(id);
    if (it == positions_.end()) {
      positions_.emplace(id, tokens);
    } else if (it->second != tokens) {
      if (it->second == 0)
        it->second = tokens;
      else if (tokens != 0)
        throw Error(ErrorCode::MarkingConflict,
                    "position '" + id + "' carries conflicting markings (" +
                        std::to_string(it->second) + " vs " + std::to_string(tokens) + ")");
    }
  }
  for (const auto& [id, info] : fragment.transitions_) {
    if (positions_.count(id))
      throw Error(ErrorCode::NamespaceClash, "'" + id + "' already names a position");
    auto it = transitions_.find(id);
    if (it == transitions_.end()) {
      transitions_.emplace(id, info);
      continue;
    }
    Transition& mine = it->second;
    if (mine.speed != info.speed) {
      if (mine.speed == 1)
        mine.speed = info.speed;
      else if (info.speed != 1)
        throw Error(ErrorCode::ParameterConflict, "speeds disagree on transition '" + id + "'");
    }
    if (mine.delay != info.delay) {
      if (mine.delay == 0)
        mine.delay = info.delay;
      else if (info.delay != 0)
        throw Error(ErrorCode::ParameterConflict, "delays disagree on transition '" + id + "'");
    }
    mine.delay_counter = std::min(std::max(mine.delay_counter, info.delay_counter), mine.delay);
  }
  for (const Arc& arc : fragment.arcs_) merge_arc(arc);
}

PetriNet::RemovedNodes PetriNet::remove_complex(const std::vector<StructuralUnit>& complex) {
  // Aggregate first so a complex listing the same unit twice is validated as a whole.
  std::map<std::tuple<std::string, std::string, UnitKind>, int> wanted;
  for (const StructuralUnit& u : complex) {
    if (u.multiplicity < 1) throw std::invalid_argument("unit multiplicity must be >= 1");
    wanted[{u.position, u.transition, u.kind}] += u.multiplicity;
  }
  for (const auto& [key, count] : wanted) {
    const auto& [pos, trans, kind] = key;
    const Arc* arc = find_arc(kind, pos, trans);
    if (arc == nullptr || arc->multiplicity < count)
      throw Error(ErrorCode::UnknownNode,
                  "unit not present in the net: " +
                      StructuralUnit{kind, pos, trans, count, {}}.text());
  }

  std::vector<std::string> touched;
  for (const auto& [key, count] : wanted) {
    const auto& [pos, trans, kind] = key;
    auto it = std::lower_bound(arcs_.begin(), arcs_.end(), nullptr,
                               [&](const Arc& a, std::nullptr_t) {
                                 return arc_key_less(a, pos, trans, kind);
                               });
    it->multiplicity -= count;
    if (it->multiplicity == 0) {
      touched.push_back(pos);
      touched.push_back(trans);
      arcs_.erase(it);
    }
  }

  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

  RemovedNodes removed;
  for (const std::string& id : touched) {
    bool incident = false;
    for (const Arc& a : arcs_) {
      if (a.position == id || a.transition == id) {
        incident = true;
        break;
      }
    }
    if (incident) continue;
    if (auto p = positions_.find(id); p != positions_.end()) {
      removed.positions.emplace_back(id, p->second);
      positions_.erase(p);
    } else if (auto t = transitions_.find(id); t != transitions_.end()) {
      removed.transitions.push_back(id);
      transitions_.erase(t);
    }
  }
  return removed;
}

PetriNet new_net() { return {}; }

bool labeled_equal(const PetriNet& a, const PetriNet& b) {
  if (a.positions() != b.positions()) return false;
  const auto& ta = a.transitions();
  const auto& tb = b.transitions();
  if (ta.size() != tb.size()) return false;
  for (auto ia = ta.begin(), ib = tb.begin(); ia != ta.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (ia->second.speed != ib->second.speed || ia->second.delay != ib->second.delay) return false;
  }
  const auto& aa = a.arcs();
  const auto& ab = b.arcs();
  if (aa.size() != ab.size()) return false;
  for (size_t i = 0; i < aa.size(); ++i) {
    if (aa[i].unit() != ab[i].unit()) return false;
  }
  return true;
}

long long total_tokens(const PetriNet& net) {
  long long sum = 0;
  for (const auto& [id, tokens] : net.positions()) sum += tokens;
  return sum;
}

std::string_view endpoint_class_name(EndpointClass c) {
  switch (c) {
    case EndpointClass::ResourceEntry: return "ResourceEntry";
    case EndpointClass::ProcessEntry: return "ProcessEntry";
    case EndpointClass::AccumulativeEnd: return "AccumulativeEnd";
    case EndpointClass::StockEnd: return "StockEnd";
  }
  return "?";
}

std::vector<std::pair<std::string, EndpointClass>> classify_endpoints(const PetriNet& net) {
  std::vector<std::pair<std::string, EndpointClass>> out;
  for (const auto& [id, tokens] : net.positions()) {
    (void)tokens;
    bool incoming = false, outgoing = false;
    for (const auto& a : net.arcs()) {
      if (a.position != id) continue;
      (a.kind == UnitKind::I ? incoming : outgoing) = true;
    }
    if (!incoming) out.emplace_back(id, EndpointClass::ResourceEntry);
    if (!outgoing) out.emplace_back(id, EndpointClass::AccumulativeEnd);
  }
  for (const auto& [id, info] : net.transitions()) {
    (void)info;
    bool consumes = false, produces = false;
    for (const auto& a : net.arcs()) {
      if (a.transition != id) continue;
      if (a.kind == UnitKind::C) consumes = true;
      if (a.kind == UnitKind::I) produces = true;
    }
    if (!consumes) out.emplace_back(id, EndpointClass::ProcessEntry);
    if (!produces) out.emplace_back(id, EndpointClass::StockEnd);
  }
  return out;
}

void validate(const PetriNet& net) {
  for (const auto& [id, tokens] : net.positions()) {
    if (!is_valid_identifier(id)) throw Error(ErrorCode::InvalidIdentifier, "position '" + id + "'");
    if (net.has_transition(id))
      throw Error(ErrorCode::NamespaceClash, "'" + id + "' in both namespaces");
    if (tokens < 0) throw Error(ErrorCode::MarkingConflict, "negative marking on '" + id + "'");
  }
  for (const auto& [id, info] : net.transitions()) {
    if (!is_valid_identifier(id))
      throw Error(ErrorCode::InvalidIdentifier, "transition '" + id + "'");
    if (info.speed < 1 || info.delay < 0 || info.delay_counter < 0 ||
        info.delay_counter > info.delay)
      throw Error(ErrorCode::ParameterConflict, "bad parameters on transition '" + id + "'");
    bool incident = false;
    for (const auto& a : net.arcs())
      if (a.transition == id) { incident = true; break; }
    if (!incident)
      throw Error(ErrorCode::UnknownNode, "transition '" + id + "' has no incident arcs");
  }
  const auto& arcs = net.arcs();
  for (size_t i = 0; i < arcs.size(); ++i) {
    const auto& a = arcs[i];
    if (!net.has_position(a.position))
      throw Error(ErrorCode::UnknownNode, "arc references missing position '" + a.position + "'");
    if (!net.has_transition(a.transition))
      throw Error(ErrorCode::UnknownNode,
                  "arc references missing transition '" + a.transition + "'");
    if (a.multiplicity < 1 || a.effective_threshold() < 1)
      throw Error(ErrorCode::ParameterConflict, "bad arc parameters on " + a.unit().text());
    if (i > 0 && !canonical_less(arcs[i - 1].unit(), a.unit()))
      throw Error(ErrorCode::ParameterConflict, "arc table out of canonical order");
  }
}

bool is_valid_identifier(std::string_view id) {
  if (id.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(id.front()))) return false;
  for (char c : id)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

int component_count(const PetriNet& net) {
  std::map<std::string, std::string> parent;
  auto find = [&](std::string x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& [id, m] : net.positions()) { (void)m; parent[id] = id; }
  for (const auto& [id, t] : net.transitions()) { (void)t; parent[id] = id; }
  for (const auto& a : net.arcs()) {
    std::string ra = find(a.position), rb = find(a.transition);
    if (ra != rb) parent[ra] = rb;
  }
  int count = 0;
  for (const auto& [id, p] : parent) {
    (void)p;
    if (find(id) == id) ++count;
  }
  return count;
}

}  // namespace cpn
