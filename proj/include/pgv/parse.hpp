#pragma once

#include <stdexcept>
#include <string>
#include <variant>

#include "pgv/syntax.hpp"

namespace pgv {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int l, int c)
      : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg), line(l), col(c) {}
};

TypeP parse_type(const std::string& text);
TermP parse_term(const std::string& text);
ConfP parse_config(const std::string& text);

// A source file holds either a term (run as the main thread) or a configuration.
using Program = std::variant<TermP, ConfP>;
Program parse_program(const std::string& text);

// Core term only: removes every sugar node.
TermP elaborate(const TermP& t);
ConfP elaborate(const ConfP& c);

}  // namespace pgv
