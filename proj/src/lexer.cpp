#include "lexer.hpp"

#include <cctype>
#include <set>

#include "pgv/parse.hpp"

namespace pgv::detail {

namespace {
bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}
}  // namespace

std::vector<Token> lex(const std::string& src) {
  static const char* syms[] = {"<->", "||", "->", "-o", "(", ")", "[", "]", "{", "}", ",", ";",
                               ".",   ":",  "=",  "\\", "!", "?", "*", "+", "&", "^", "<", ">",
                               "|"};
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    int l = line, cl = col;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      out.push_back({Tok::Ident, src.substr(i, j - i), l, cl});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Number, src.substr(i, j - i), l, cl});
      advance(j - i);
      continue;
    }
    if (c == '$') {
      std::size_t j = i + 1;
      while (j < src.size() && ident_char(src[j])) ++j;
      if (j == i + 1) throw ParseError("empty priority hole name", l, cl);
      std::size_t k = j;
      if (k + 1 < src.size() && src[k] == '+' && std::isdigit(static_cast<unsigned char>(src[k + 1]))) {
        ++k;
        while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
      }
      out.push_back({Tok::Hole, src.substr(i + 1, k - i - 1), l, cl});
      advance(k - i);
      continue;
    }
    bool matched = false;
    for (const char* s : syms) {
      std::string sym(s);
      if (src.compare(i, sym.size(), sym) == 0) {
        out.push_back({Tok::Sym, sym, l, cl});
        advance(sym.size());
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", l, cl);
  }
  out.push_back({Tok::End, "<end of input>", line, col});
  return out;
}

void Cursor::expect(const std::string& sym) {
  if (!accept(sym)) fail("expected '" + sym + "' but found '" + peek().text + "'");
}

void Cursor::fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().col); }

bool is_keyword(const std::string& s) {
  static const std::set<std::string> kws = {
      "let",   "in",   "case",  "inl",  "inr",  "absurd", "offer", "select", "fork",
      "new",   "link", "spawn", "send", "recv", "close",  "wait",  "end",    "nu",
      "main",  "child", "bot",  "top",  "halt", "one",    "zero"};
  return kws.count(s) > 0;
}

}  // namespace pgv::detail
