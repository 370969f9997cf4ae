#pragma once

#include "cpn/creative.hpp"
#include "cpn/dynamics.hpp"

namespace cpn {

struct SourceSpan {
  size_t begin = 0;
  size_t end = 0;
  int line = 1;
  int column = 1;
};

enum class Severity { Error, Warning };

struct ParseDiagnostic {
  Severity severity = Severity::Error;
  std::string message;
  SourceSpan span;
};

struct Document {
  PetriNet net;
  std::vector<CreativeRule> rules;
};

struct ParseResult {
  std::optional<Document> document;
  std::vector<ParseDiagnostic> diagnostics;
  bool ok() const { return document.has_value(); }
};

// Parses the .cpn DSL: a `net { ... }` block of units and m/v/d annotations,
// followed by an optional `rules { ... }` block. Units fold through add_unit,
// so repeating a unit is whole-fusion. Every failure carries a spanned error.
ParseResult parse_net(std::string_view text);

// Deterministic unit-list form; parse_net(render_canonical(net, rules))
// restores the net exactly (labeled_equal) and re-rendering is a fixpoint.
std::string render_canonical(const PetriNet& net, const std::vector<CreativeRule>& rules = {});

// Body form without the net { } wrapper, used when printing defusion output.
std::string render_units(const PetriNet& net);

std::string render_rule(const CreativeRule& rule);

// One-way paper-style formula: chains elide shared indices, fan-in/fan-out
// bracket with "." placeholders, disjoint fragments join with the
// composition sign. Display only; not meant to re-parse.
std::string render_pretty(const PetriNet& net);

// DOT digraph: positions as circles "id:m", transitions as boxes, inhibitor
// arcs with a circle arrowhead, associative arcs dashed. Byte-deterministic.
std::string export_dot(const PetriNet& net);

// Trace serialization (JSON lines). One object per step; warning entries are
// emitted as their own lines ahead of the step object.
std::string trace_event_json(const TraceEvent& event);
std::string rule_warning_json(const RuleWarning& warning);

}  // namespace cpn
