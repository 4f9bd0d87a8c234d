#include "pgv/priority.hpp"

namespace pgv {

std::string to_string(const Priority& p) {
  if (p.unresolved()) return "$" + p.hole + (p.offset ? "+" + std::to_string(p.offset) : "");
  return std::to_string(p.value);
}

std::string to_string(const PriorityBound& p) {
  switch (p.kind) {
    case PriorityBound::Kind::Bot: return "bot";
    case PriorityBound::Kind::Top: return "top";
    case PriorityBound::Kind::Fin: return to_string(p.o);
  }
  return "?";
}

std::string describe(const PriorityBound& p) {
  if (p.is_fin() && !p.o.hole.empty() && !p.o.unresolved())
    return p.o.hole + (p.o.offset ? "+" + std::to_string(p.o.offset) : "") + "(=" +
           std::to_string(p.o.value) + ")";
  return to_string(p);
}

}  // namespace pgv
