#include "pgv/parse.hpp"

#include <map>

#include "lexer.hpp"

namespace pgv {

using detail::Cursor;
using detail::Tok;

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : c_(detail::lex(text)) {}

  Cursor& cursor() { return c_; }

  // ------------------------------------------------------------ priorities

  Priority priority() {
    auto t = c_.peek();
    if (t.kind == Tok::Number) {
      c_.next();
      return Priority(std::stoi(t.text));
    }
    if (t.kind == Tok::Hole) {
      c_.next();
      auto plus = t.text.find('+');
      std::string hole = t.text.substr(0, plus);
      int offset = plus == std::string::npos ? 0 : std::stoi(t.text.substr(plus + 1));
      // $o=3 keeps the hole's name on a filled priority
      if (c_.at("=") && c_.peek(1).kind == Tok::Number) {
        c_.next();
        return Priority(std::stoi(c_.next().text), hole, offset);
      }
      return Priority(-1, hole, offset);
    }
    c_.fail("expected a priority but found '" + t.text + "'");
  }

  PriorityBound bound() {
    if (c_.accept("bot")) return PriorityBound::bot();
    if (c_.accept("top")) return PriorityBound::top();
    return PriorityBound::fin(priority());
  }

  // ------------------------------------------------------------ types

  TypeP type() {
    TypeP a = sum_type();
    if (c_.accept("-o")) {
      PriorityBound p = PriorityBound::top(), q = PriorityBound::bot();
      if (c_.accept("[")) {
        p = bound();
        c_.expect(",");
        q = bound();
        c_.expect("]");
        c_.expect("->");
      }
      return ty::fn(p, q, a, type());
    }
    return a;
  }

  TypeP sum_type() {
    TypeP a = prod_type();
    while (c_.accept("+")) a = ty::sum(a, prod_type());
    return a;
  }

  TypeP prod_type() {
    TypeP a = atom_type();
    while (c_.accept("*")) a = ty::prod(a, atom_type());
    return a;
  }

  TypeP atom_type() {
    auto t = c_.peek();
    if (t.kind == Tok::Number && (t.text == "1" || t.text == "0")) {
      c_.next();
      return t.text == "1" ? ty::unit() : ty::void_();
    }
    if (c_.accept("(")) {
      TypeP inner = type();
      c_.expect(")");
      return inner;
    }
    if (c_.at("!") || c_.at("?")) {
      bool snd = c_.next().text == "!";
      Priority o = priority();
      TypeP payload = type();
      c_.expect(".");
      TypeP cont = type();
      if (!cont->is_session()) c_.fail("continuation of a session type must be a session type");
      return snd ? ty::send(o, payload, cont) : ty::recv(o, payload, cont);
    }
    if (c_.accept("end")) {
      if (c_.accept("!")) return ty::end_send(priority());
      c_.expect("?");
      return ty::end_recv(priority());
    }
    if (c_.at("+") || c_.at("&")) {
      bool sel = c_.next().text == "+";
      Priority o = priority();
      c_.expect("{");
      if (c_.accept("}")) return sel ? ty::select_empty(o) : ty::offer_empty(o);
      TypeP s1 = type();
      c_.expect(",");
      TypeP s2 = type();
      c_.expect("}");
      if (!s1->is_session() || !s2->is_session()) c_.fail("choice branches must be session types");
      return sel ? ty::select(o, s1, s2) : ty::offer(o, s1, s2);
    }
    c_.fail("expected a type but found '" + t.text + "'");
  }

  TypeP opt_ann() {
    if (!c_.accept("[")) return nullptr;
    TypeP t = type();
    c_.expect("]");
    return t;
  }

  // ------------------------------------------------------------ names

  Name ident() {
    auto t = c_.peek();
    if (t.kind != Tok::Ident || detail::is_keyword(t.text))
      c_.fail("expected a name but found '" + t.text + "'");
    c_.next();
    return t.text;
  }

  Name bind(const Name& x) {
    Name f = fresh_name(x);
    scope_.push_back({x, f});
    return f;
  }
  void unbind(std::size_t n) { scope_.resize(scope_.size() - n); }
  Name resolve(const Name& x) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == x) return it->second;
    return x;
  }

  // ------------------------------------------------------------ terms

  TermP expr() {
    Span sp = c_.span();
    TermP t = expr_inner();
    if (!t->span.line) const_cast<Term&>(*t).span = sp;
    return t;
  }

  TermP expr_inner() {
    if (c_.at("let")) return let_form();
    if (c_.at("\\")) return lam_form();
    if (c_.at("case")) return case_form(false);
    if (c_.at("offer")) return offer_form();
    TermP a = app();
    if (c_.at(";") && !(c_.at("inr", 1) && c_.peek(2).kind == Tok::Ident && c_.at("->", 3)) &&
        !c_.at("}", 1)) {
      c_.next();
      return tm::seq(a, expr());
    }
    return a;
  }

  TermP let_form() {
    c_.expect("let");
    if (c_.accept("(")) {
      auto pat = [&]() -> std::pair<Name, bool> {
        if (c_.at("(") && c_.at(")", 1)) {
          c_.next();
          c_.next();
          return {"u", true};
        }
        return {ident(), false};
      };
      auto [x, xu] = pat();
      c_.expect(",");
      auto [y, yu] = pat();
      c_.expect(")");
      if (!xu && !yu && x == y) c_.fail("duplicate binder '" + x + "' in pattern");
      c_.expect("=");
      TermP m = expr();
      c_.expect("in");
      Name fx = bind(x), fy = bind(y);
      TermP body = expr();
      unbind(2);
      if (yu) body = tm::seq(tm::var(fy), body);
      if (xu) body = tm::seq(tm::var(fx), body);
      return tm::let_pair(fx, fy, m, body);
    }
    Name x = ident();
    c_.expect("=");
    TermP m = expr();
    c_.expect("in");
    Name fx = bind(x);
    TermP body = expr();
    unbind(1);
    return tm::let(fx, m, body);
  }

  TermP lam_form() {
    c_.expect("\\");
    if (c_.accept("(")) {
      if (c_.accept(")")) {
        c_.expect(".");
        return tm::lam_unit(expr());
      }
      Name x = ident();
      if (c_.accept(":")) {
        TypeP t = type();
        c_.expect(")");
        c_.expect(".");
        Name fx = bind(x);
        TermP body = expr();
        unbind(1);
        return tm::lam(fx, body, t);
      }
      c_.expect(",");
      Name y = ident();
      if (x == y) c_.fail("duplicate binder '" + x + "' in pattern");
      c_.expect(")");
      TypeP t;
      if (c_.accept(":")) t = type();
      c_.expect(".");
      Name fx = bind(x), fy = bind(y);
      TermP body = expr();
      unbind(2);
      return tm::lam_pair(fx, fy, body, t);
    }
    Name x = ident();
    c_.expect(".");
    Name fx = bind(x);
    TermP body = expr();
    unbind(1);
    return tm::lam(fx, body);
  }

  struct Branches {
    Name x, y;
    TermP l, r;
  };

  Branches branches() {
    c_.expect("{");
    c_.expect("inl");
    Name x = ident();
    c_.expect("->");
    Name fx = bind(x);
    TermP l = expr();
    unbind(1);
    c_.expect(";");
    c_.expect("inr");
    Name y = ident();
    c_.expect("->");
    Name fy = bind(y);
    TermP r = expr();
    unbind(1);
    c_.expect("}");
    return {fx, fy, l, r};
  }

  TermP case_form(bool) {
    c_.expect("case");
    TermP m = app();
    auto b = branches();
    return tm::case_(m, b.x, b.l, b.y, b.r);
  }

  TermP offer_form() {
    c_.expect("offer");
    TypeP ann = opt_ann();
    TermP m = app();
    if (c_.at("{") && c_.at("}", 1)) {
      c_.next();
      c_.next();
      return tm::offer_empty(m, ann);
    }
    if (ann) c_.fail("only an empty offer takes a type annotation");
    auto b = branches();
    return tm::offer(m, b.x, b.l, b.y, b.r);
  }

  bool atom_start() const {
    const auto& t = c_.peek();
    if (t.kind == Tok::Ident) {
      if (!detail::is_keyword(t.text)) return true;
      static const char* consts[] = {"link", "new", "spawn", "send", "recv", "close", "wait"};
      for (auto k : consts)
        if (t.text == k) return true;
      return false;
    }
    return t.kind == Tok::Sym && t.text == "(";
  }

  bool prefix_start() const {
    return c_.at("inl") || c_.at("inr") || c_.at("absurd") || c_.at("fork") || c_.at("select");
  }

  TermP app() {
    TermP f = unary();
    while (atom_start()) f = tm::app(f, atom());
    return f;
  }

  TermP unary() {
    if (c_.accept("inl")) {
      TypeP a = opt_ann();
      return tm::inl(unary(), a);
    }
    if (c_.accept("inr")) {
      TypeP a = opt_ann();
      return tm::inr(unary(), a);
    }
    if (c_.accept("absurd")) {
      TypeP a = opt_ann();
      return tm::absurd(unary(), a);
    }
    if (c_.accept("fork")) {
      TypeP a = opt_ann();
      return tm::fork(unary(), a);
    }
    if (c_.accept("select")) {
      TypeP a = opt_ann();
      bool right;
      if (c_.accept("inl")) right = false;
      else if (c_.accept("inr")) right = true;
      else c_.fail("expected 'inl' or 'inr' after select");
      return tm::select(right, unary(), a);
    }
    if (!atom_start()) c_.fail("expected a term but found '" + c_.peek().text + "'");
    return atom();
  }

  TermP atom() {
    Span sp = c_.span();
    auto t = c_.peek();
    TermP r;
    if (c_.accept("(")) {
      if (c_.accept(")")) {
        r = tm::unit();
        return r;
      }
      TermP a = expr();
      if (c_.accept(",")) {
        TermP b = expr();
        c_.expect(")");
        r = tm::pair(a, b);
      } else {
        c_.expect(")");
        return a;
      }
    } else {
      static const std::pair<const char*, Const> consts[] = {
          {"link", Const::Link}, {"new", Const::New},     {"spawn", Const::Spawn},
          {"send", Const::Send}, {"recv", Const::Recv},   {"close", Const::Close},
          {"wait", Const::Wait}};
      for (auto& [s, k] : consts)
        if (t.text == s) {
          c_.next();
          TypeP a = opt_ann();
          if (a && k != Const::New) c_.fail("only 'new' takes a session type annotation");
          r = tm::cnst(k, a);
          break;
        }
      if (!r) r = tm::var(resolve(ident()));
    }
    const_cast<Term&>(*r).span = sp;
    return r;
  }

  // ------------------------------------------------------------ configurations

  ConfP conf() {
    ConfP a = conf_atom();
    if (c_.accept("||")) return cf::par(a, conf());
    return a;
  }

  ConfP conf_atom() {
    if (c_.accept("main")) return cf::main(expr(), next_id_++);
    if (c_.accept("child")) return cf::child(expr(), next_id_++);
    if (c_.at("(") && c_.at("nu", 1)) {
      c_.next();
      c_.next();
      Name x = ident(), y = ident();
      if (x == y) c_.fail("a restriction binds two distinct names");
      TypeP ann;
      if (c_.accept(":")) ann = type();
      c_.expect(")");
      Name fx = bind(x), fy = bind(y);
      ConfP body = conf();
      unbind(2);
      return cf::res(fx, fy, body, ann);
    }
    if (c_.accept("(")) {
      ConfP inner = conf();
      c_.expect(")");
      return inner;
    }
    c_.fail("expected a configuration but found '" + c_.peek().text + "'");
  }

  void finish() {
    if (!c_.at_end()) c_.fail("unexpected '" + c_.peek().text + "'");
  }

 private:
  Cursor c_;
  std::vector<std::pair<Name, Name>> scope_;
  unsigned next_id_ = 0;
};

}  // namespace

TypeP parse_type(const std::string& text) {
  Parser p(text);
  TypeP t = p.type();
  p.finish();
  return t;
}

TermP parse_term(const std::string& text) {
  Parser p(text);
  TermP t = p.expr();
  p.finish();
  return t;
}

ConfP parse_config(const std::string& text) {
  Parser p(text);
  ConfP c = p.conf();
  p.finish();
  return c;
}

Program parse_program(const std::string& text) {
  Parser probe(text);
  auto& c = probe.cursor();
  bool conf = c.at("main") || c.at("child");
  for (std::size_t i = 0; !conf && c.at("(", i); ++i)
    conf = c.at("nu", i + 1) || c.at("main", i + 1) || c.at("child", i + 1);
  if (conf) return parse_config(text);
  return parse_term(text);
}

}  // namespace pgv
