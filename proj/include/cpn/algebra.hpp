#pragma once

#include <variant>

#include "cpn/core.hpp"

namespace cpn {

enum class FuseKind { P, T, W };

// AST over structural units: unit literals, p/t/whole-fusion applications and
// free composition (the ∘ of disjoint-or-R1-joinable fragments).
struct NetFormula {
  struct UnitLit {
    StructuralUnit unit;
  };
  struct Fuse {
    FuseKind kind = FuseKind::P;
    // Fusion target; when absent it is inferred as the unique node shared by
    // every operand (FusionTargetMissing when there is no unique candidate).
    std::optional<std::string> at;
    std::vector<NetFormula> operands;
  };
  struct Compose {
    std::vector<NetFormula> operands;
  };

  std::variant<UnitLit, Fuse, Compose> node;

  static NetFormula lit(StructuralUnit unit);
  static NetFormula pfuse(std::vector<NetFormula> operands, std::optional<std::string> at = {});
  static NetFormula tfuse(std::vector<NetFormula> operands, std::optional<std::string> at = {});
  static NetFormula wfuse(StructuralUnit unit, int n);
  static NetFormula compose(std::vector<NetFormula> operands);
};

// n-ary fusion of fragments at a shared position; every fragment must contain
// `at` (FusionTargetMissing otherwise). Markings of the fused position must be
// equal or all-but-one zero.
PetriNet pf(const std::vector<PetriNet>& fragments, const std::string& at);

// n-ary fusion at a shared transition; speeds/delays must agree or be default.
PetriNet tf(const std::vector<PetriNet>& fragments, const std::string& at);

// n-fold self-fusion: multiplies the unit's arc multiplicity by n (n >= 2).
PetriNet wf(const StructuralUnit& unit, int n);

PetriNet build(const NetFormula& formula);

// Decomposition into structural units. Each unit is materialized as a
// single-arc fragment carrying its endpoints' markings and parameters, so
// recomposing the fragments under R1 restores the net exactly.
struct DefusionResult {
  std::optional<PetriNet> residual;      // partial mode only; nullopt when empty
  std::vector<PetriNet> unit_fragments;  // canonical order, one arc each

  std::vector<StructuralUnit> units() const;
};

// Full mode (at == nullopt): one unit per arc, canonical order. Partial mode:
// the outgoing arcs of `at` are split off as units and the rest of the net is
// the residual. The source net is never modified and never fired.
DefusionResult defuse(const PetriNet& net, const std::optional<std::string>& at = {});

// Composition of the fragments under R1 (the inverse direction of defuse).
PetriNet rebuild(const DefusionResult& parts);

}  // namespace cpn
