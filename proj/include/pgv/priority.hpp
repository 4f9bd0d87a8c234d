#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace pgv {

// A priority o in N. `hole` names the source annotation variable when the
// value was produced by filling a skeleton; it never takes part in ordering.
struct Priority {
  int value = 0;
  std::string hole;
  int offset = 0;  // an unresolved hole stands for hole + offset

  Priority() = default;
  Priority(int v) : value(v) {}
  Priority(int v, std::string h, int off = 0) : value(v), hole(std::move(h)), offset(off) {}

  bool unresolved() const { return value < 0; }
  friend bool operator==(const Priority& a, const Priority& b) { return a.value == b.value; }
  friend auto operator<=>(const Priority& a, const Priority& b) { return a.value <=> b.value; }
};

struct PriorityBound {
  enum class Kind : std::uint8_t { Bot, Fin, Top };
  Kind kind = Kind::Bot;
  Priority o;

  static PriorityBound bot() { return {Kind::Bot, {}}; }
  static PriorityBound top() { return {Kind::Top, {}}; }
  static PriorityBound fin(Priority p) { return {Kind::Fin, std::move(p)}; }

  bool is_bot() const { return kind == Kind::Bot; }
  bool is_top() const { return kind == Kind::Top; }
  bool is_fin() const { return kind == Kind::Fin; }

  friend bool operator==(const PriorityBound& a, const PriorityBound& b) {
    return a.kind == b.kind && (a.kind != Kind::Fin || a.o == b.o);
  }
  // Strict order: bot < Fin 0 < Fin 1 < ... < top.
  friend bool operator<(const PriorityBound& a, const PriorityBound& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    return a.kind == Kind::Fin && a.o.value < b.o.value;
  }
  friend bool operator<=(const PriorityBound& a, const PriorityBound& b) { return !(b < a); }
};

inline PriorityBound meet(const PriorityBound& a, const PriorityBound& b) { return b < a ? b : a; }
inline PriorityBound join(const PriorityBound& a, const PriorityBound& b) { return a < b ? b : a; }

std::string to_string(const Priority& p);
std::string to_string(const PriorityBound& p);

// Renders with the hole name when one is recorded, e.g. "o'(=3)".
std::string describe(const PriorityBound& p);

}  // namespace pgv
