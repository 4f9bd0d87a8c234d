#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pgv/syntax.hpp"

namespace pgv::detail {

enum class Tok { Ident, Number, Hole, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

std::vector<Token> lex(const std::string& src);

class Cursor {
 public:
  explicit Cursor(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at(const std::string& sym, std::size_t ahead = 0) const {
    const auto& t = peek(ahead);
    return (t.kind == Tok::Sym || t.kind == Tok::Ident) && t.text == sym;
  }
  bool at_end() const { return peek().kind == Tok::End; }
  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool accept(const std::string& sym) {
    if (!at(sym)) return false;
    next();
    return true;
  }
  void expect(const std::string& sym);
  [[noreturn]] void fail(const std::string& msg) const;
  std::size_t pos() const { return pos_; }
  void reset(std::size_t p) { pos_ = p; }
  Span span() const { return {peek().line, peek().col}; }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

bool is_keyword(const std::string& s);

}  // namespace pgv::detail
