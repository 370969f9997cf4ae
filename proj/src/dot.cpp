#include "cpn/textio.hpp"

namespace cpn {

std::string export_dot(const PetriNet& net) {
  std::string out = "digraph cpn {\n  rankdir=LR;\n";
  for (const auto& [id, tokens] : net.positions()) {
    out += "  \"" + id + "\" [shape=circle, label=\"" + id + ":" + std::to_string(tokens) +
           "\"];\n";
  }
  for (const auto& [id, info] : net.transitions()) {
    std::string label = id;
    if (info.speed != 1) label += " v=" + std::to_string(info.speed);
    if (info.delay != 0) label += " d=" + std::to_string(info.delay);
    out += "  \"" + id + "\" [shape=box, label=\"" + label + "\"];\n";
  }
  for (const PetriNet::Arc& arc : net.arcs()) {
    std::string from = arc.position_to_transition() ? arc.position : arc.transition;
    std::string to = arc.position_to_transition() ? arc.transition : arc.position;
    std::vector<std::string> attrs;
    if (arc.multiplicity > 1) attrs.push_back("label=\"" + std::to_string(arc.multiplicity) + "\"");
    if (arc.kind == UnitKind::B) attrs.push_back("arrowhead=odot");
    if (arc.kind == UnitKind::A) attrs.push_back("style=dashed");
    out += "  \"" + from + "\" -> \"" + to + "\"";
    if (!attrs.empty()) {
      out += " [";
      for (size_t i = 0; i < attrs.size(); ++i) {
        if (i) out += ", ";
        out += attrs[i];
      }
      out += "]";
    }
    out += ";\n";
  }
  out += "}\n";
  return out;
}

}  // namespace cpn
