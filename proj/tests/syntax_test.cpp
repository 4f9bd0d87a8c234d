#include <doctest.h>

#include "pgv/eval.hpp"
#include "pgv/parse.hpp"
#include "pgv/syntax.hpp"

using namespace pgv;

namespace {

bool has_sugar(const TermP& t) {
  if (is_sugar(t->kind)) return true;
  for (auto& k : t->kids)
    if (has_sugar(k)) return true;
  return false;
}

}  // namespace

TEST_CASE("parse unit and new") {
  auto u = parse_term("()");
  CHECK(u->kind == TermKind::Unit);

  auto t = parse_term("let (x,y) = new () in ()");
  REQUIRE(t->kind == TermKind::LetPair);
  REQUIRE(t->kids.size() == 2);
  CHECK(t->kids[0]->kind == TermKind::App);
  CHECK(t->kids[0]->kids[0]->kind == TermKind::Const);
  CHECK(t->kids[0]->kids[0]->k == Const::New);
  CHECK(t->kids[0]->kids[1]->kind == TermKind::Unit);
  CHECK(t->kids[1]->kind == TermKind::Unit);
}

TEST_CASE("parse errors carry a position") {
  CHECK_THROWS_AS(parse_term("let (x = ()"), ParseError);
  try {
    parse_term("\n  )");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("let elaborates to an applied lambda") {
  auto t = elaborate(parse_term("let x = () in x"));
  REQUIRE(t->kind == TermKind::App);
  CHECK(t->kids[0]->kind == TermKind::Lam);
  CHECK(t->kids[1]->kind == TermKind::Unit);
  CHECK(is_core(t));
}

TEST_CASE("select and empty offer elaborate to core terms") {
  auto s = elaborate(parse_term("\\(x : +0{end! 1, end! 1}). select[+0{end! 1, end! 1}] inl x"));
  CHECK_FALSE(has_sugar(s));
  auto str = to_string(s);
  CHECK(str.find("new") != std::string::npos);
  CHECK(str.find("inl") != std::string::npos);
  CHECK(str.find("close") != std::string::npos);

  auto o = elaborate(parse_term("\\(l : &0{}). offer[1] l {}"));
  CHECK_FALSE(has_sugar(o));
  auto ostr = to_string(o);
  CHECK(ostr.find("recv") != std::string::npos);
  CHECK(ostr.find("wait") != std::string::npos);
  CHECK(ostr.find("absurd") != std::string::npos);
}

TEST_CASE("elaboration is idempotent") {
  auto t = elaborate(parse_term("let x = (\\y. y) () in let (a, b) = ((), x) in a; b"));
  CHECK(alpha_equal(elaborate(t), t));
}

TEST_CASE("session duality") {
  CHECK(type_equal(dual(ty::end_send(0)), ty::end_recv(0)));
  CHECK(type_equal(dual(ty::send(0, ty::unit(), ty::end_send(1))),
                   ty::recv(0, ty::unit(), ty::end_recv(1))));
  auto s = ty::recv(2, ty::end_send(3), ty::end_recv(4));
  CHECK(type_equal(dual(dual(s)), s));
}

TEST_CASE("priorities of session types") {
  CHECK(pr(ty::send(3, ty::unit(), ty::end_send(4))).value == 3);
  CHECK(pr(ty::end_recv(0)).value == 0);
  auto s = ty::recv(1, ty::unit(), ty::end_recv(2));
  CHECK(pr(s) == pr(dual(s)));
}

TEST_CASE("minpr of types and environments") {
  CHECK(minpr(ty::unit()).is_top());
  CHECK(minpr(ty::fn(PriorityBound::fin(5), PriorityBound::fin(9), ty::unit(), ty::unit())) ==
        PriorityBound::fin(5));
  TypeEnv env;
  env.add("x", ty::end_send(2));
  env.add("y", ty::end_recv(5));
  CHECK(minpr(env) == PriorityBound::fin(2));
  CHECK(minpr(TypeEnv{}).is_top());
}

TEST_CASE("priority bounds order bot below numbers below top") {
  auto bot = PriorityBound::bot(), top = PriorityBound::top();
  CHECK(bot < PriorityBound::fin(0));
  CHECK(PriorityBound::fin(7) < top);
  CHECK_FALSE(top < top);
  CHECK_FALSE(bot < bot);
  CHECK(meet(PriorityBound::fin(3), bot).is_bot());
  CHECK(join(PriorityBound::fin(3), top).is_top());
}

TEST_CASE("substitution") {
  auto x = tm::var("x"), y = tm::var("y");
  CHECK(substitute(x, tm::unit(), "x")->kind == TermKind::Unit);

  auto p = substitute(tm::pair(x, y), tm::unit(), "x");
  REQUIRE(p->kind == TermKind::Pair);
  CHECK(p->kids[0]->kind == TermKind::Unit);
  CHECK(p->kids[1]->kind == TermKind::Var);
  CHECK(p->kids[1]->name == "y");

  auto s = substitute(tm::seq(x, tm::unit()), tm::unit(), "x");
  CHECK(alpha_equal(s, tm::seq(tm::unit(), tm::unit())));
}

TEST_CASE("substitution never introduces names beyond the value's") {
  auto m = parse_term("\\z. (x, (z, y))");
  auto v = parse_term("\\w. (w, q)");
  auto fm = free_names(m), fv = free_names(v);
  fm.erase("x");
  for (auto& n : free_names(substitute(m, v, "x")))
    CHECK((fm.count(n) || fv.count(n)));
}

TEST_CASE("free names of terms and configurations") {
  CHECK(free_names(tm::var("x")) == NameSet{"x"});
  auto linked = cf::res("x", "y", cf::child(tm::app(Const::Link, tm::pair(tm::var("x"), tm::var("y")))));
  CHECK(free_names(linked).empty());
  auto two = cf::par(cf::child(tm::var("x")), cf::main(tm::var("y")));
  CHECK(free_names(two) == NameSet{"x", "y"});
}

TEST_CASE("flags combine with at most one main") {
  CHECK(combine_flags(Flag::Main, Flag::Child) == Flag::Main);
  CHECK(combine_flags(Flag::Child, Flag::Main) == Flag::Main);
  CHECK(combine_flags(Flag::Child, Flag::Child) == Flag::Child);
  CHECK_FALSE(combine_flags(Flag::Main, Flag::Main).has_value());
}

TEST_CASE("well-formedness rejects non-increasing priorities") {
  CHECK_FALSE(check_well_formed(parse_type("!0 1 . end! 1")).has_value());
  CHECK(check_well_formed(parse_type("!1 1 . end! 1")).has_value());
  CHECK(check_well_formed(parse_type("!2 (?1 1 . end? 3) . end! 4")).has_value());
}

TEST_CASE("printing then parsing gives the same term up to renaming") {
  const char* srcs[] = {
      "()",
      "let (x, y) = new[!0 1 . end! 1] () in let x = send ((), x) in close x; let ((), y) = recv y in wait y",
      "\\(x : 1). case inl[1 + 1] x { inl a -> a ; inr b -> b }",
      "fork[?0 1 . end? 1] (\\(x : !0 1 . end! 1). close (send ((), x)))",
      "(\\(x, y). x; y) ((), ())",
  };
  for (auto s : srcs) {
    auto t = parse_term(s);
    auto again = parse_term(to_string(t));
    CHECK_MESSAGE(alpha_equal(t, again), s);
  }
  const char* types[] = {"!0 1 . end! 1", "1 -o[0,bot]-> 1 * (1 + 0)", "&2{end? 3, end? 3}"};
  for (auto s : types) {
    auto t = parse_type(s);
    CHECK_MESSAGE(type_equal(t, parse_type(to_string(t))), s);
  }
}

TEST_CASE("configurations round-trip") {
  auto c = parse_config("(nu x y : end! 0) (child close x || main wait y)");
  CHECK(congruent(parse_config(to_string(c)), c));
}
