#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cpn {

enum class ErrorCode {
  NamespaceClash,
  FusionTargetMissing,
  MarkingConflict,
  ParameterConflict,
  ArityError,
  UnknownNode,
  InsufficientTokens,
  InvalidIdentifier,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Unit kinds double as arc kinds. C, B, A are position->transition arcs
// (normal, inhibitor, associative); I is the transition->position arc.
// Enum order is the canonical tie-break when sorting arcs.
enum class UnitKind { C, I, B, A };

char unit_kind_letter(UnitKind kind);
bool position_to_transition(UnitKind kind);  // false only for I

// One "position-arc-transition" (C/B/A) or "transition-arc-position" (I)
// triad. threshold == nullopt means the threshold follows the multiplicity.
struct StructuralUnit {
  UnitKind kind = UnitKind::C;
  std::string position;
  std::string transition;
  int multiplicity = 1;
  std::optional<int> threshold;

  int effective_threshold() const { return threshold ? *threshold : multiplicity; }

  // Canonical DSL form, e.g. "C[a,b]^2 k=3". I-units bracket as
  // [transition,position], mirroring their arc direction.
  std::string text() const;
};

// Equality is semantic: thresholds compare by effective value.
bool operator==(const StructuralUnit& a, const StructuralUnit& b);
bool operator!=(const StructuralUnit& a, const StructuralUnit& b);

// Canonical arc order: (position, transition, kind), then multiplicity.
bool canonical_less(const StructuralUnit& a, const StructuralUnit& b);

// Convenience constructors in DSL bracket order.
StructuralUnit c_unit(std::string position, std::string transition, int multiplicity = 1,
                      std::optional<int> threshold = {});
StructuralUnit i_unit(std::string transition, std::string position, int multiplicity = 1,
                      std::optional<int> threshold = {});
StructuralUnit b_unit(std::string position, std::string transition, int multiplicity = 1,
                      std::optional<int> threshold = {});
StructuralUnit a_unit(std::string position, std::string transition, int multiplicity = 1,
                      std::optional<int> threshold = {});

struct Transition {
  int speed = 1;          // max firings per step (v)
  int delay = 0;          // steps of sustained enabledness before first firing (d)
  int delay_counter = 0;  // internal; never serialized in the DSL
};

// Labeled net: positions with markings, transitions with v/d parameters, and
// a canonical arc table. Position and transition identifiers live in disjoint
// namespaces; reusing a name across them is a NamespaceClash.
class PetriNet {
 public:
  struct Arc {
    std::string position;
    std::string transition;
    UnitKind kind = UnitKind::C;
    int multiplicity = 1;
    std::optional<int> threshold;

    int effective_threshold() const { return threshold ? *threshold : multiplicity; }
    bool position_to_transition() const { return kind != UnitKind::I; }
    StructuralUnit unit() const;
  };

  struct RemovedNodes {
    std::vector<std::pair<std::string, int>> positions;  // id, marking at removal
    std::vector<std::string> transitions;
  };

  bool empty() const { return positions_.empty() && transitions_.empty(); }
  bool has_position(const std::string& id) const { return positions_.count(id) != 0; }
  bool has_transition(const std::string& id) const { return transitions_.count(id) != 0; }
  bool has_node(const std::string& id) const { return has_position(id) || has_transition(id); }

  int marking(const std::string& id) const;                    // UnknownNode
  const Transition& transition_info(const std::string& id) const;  // UnknownNode

  const std::map<std::string, int>& positions() const { return positions_; }
  const std::map<std::string, Transition>& transitions() const { return transitions_; }
  const std::vector<Arc>& arcs() const { return arcs_; }  // canonical order
  std::vector<StructuralUnit> units() const;

  const Arc* find_arc(UnitKind kind, const std::string& position,
                      const std::string& transition) const;
  // Same kind and endpoints, with at least the unit's multiplicity present.
  bool contains_unit(const StructuralUnit& u) const;

  // Creates the position if new (NamespaceClash if the id names a transition).
  void set_marking(const std::string& id, int tokens);
  void add_tokens(const std::string& id, int delta);
  void set_speed(const std::string& id, int speed);
  void set_delay(const std::string& id, int delay);
  void set_delay_counter(const std::string& id, int counter);

  // R1 fusion by identifier matching: endpoints are created when new, reused
  // otherwise. An identical arc (endpoints + kind) merges by summing
  // multiplicity (whole-fusion); explicit thresholds must agree.
  void add_unit(const StructuralUnit& u);

  // R1 union with another net: positions merge when markings are equal or all
  // but one are zero (else MarkingConflict); transition parameters must agree
  // or be default (else ParameterConflict); arcs merge as in add_unit.
  void absorb(const PetriNet& fragment);

  // Decrements every unit of the complex (all-or-nothing; UnknownNode if any
  // unit is not present at sufficient multiplicity), erases arcs reaching
  // zero, and removes nodes left without incident arcs.
  RemovedNodes remove_complex(const std::vector<StructuralUnit>& complex);

 private:
  void ensure_position(const std::string& id);
  void ensure_transition(const std::string& id);
  void merge_arc(const Arc& arc);

  std::map<std::string, int> positions_;
  std::map<std::string, Transition> transitions_;
  std::vector<Arc> arcs_;
};

PetriNet new_net();

// Exact labeled equality: position ids + markings, transition ids + speeds +
// delays (delay counters are runtime state and excluded), arcs with
// multiplicities and effective thresholds.
bool labeled_equal(const PetriNet& a, const PetriNet& b);

long long total_tokens(const PetriNet& net);

enum class EndpointClass { ResourceEntry, ProcessEntry, AccumulativeEnd, StockEnd };

std::string_view endpoint_class_name(EndpointClass c);

// Entry/end semantics of the net's sources and sinks. Inhibitor and
// associative arcs count as incidence for their position but do not make the
// gated transition a consumer. Informational only; never affects dynamics.
std::vector<std::pair<std::string, EndpointClass>> classify_endpoints(const PetriNet& net);

// Full structural scan; throws Error when an invariant is broken.
void validate(const PetriNet& net);

bool is_valid_identifier(std::string_view id);

int component_count(const PetriNet& net);

}  // namespace cpn
