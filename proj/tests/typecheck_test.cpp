#include <doctest.h>

#include <functional>

#include "pgv/parse.hpp"
#include "pgv/typecheck.hpp"
#include "support.hpp"

using namespace pgv;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const TypeError& e) {
    return e.kind;
  }
  FAIL("expected a type error");
  return ErrorKind::TypeMismatch;
}

TermTyping check(const std::string& src, const TypeEnv& env = {}) {
  return typecheck_term(env, elaborate(parse_term(src)));
}

}  // namespace

TEST_CASE("unit has type 1 and bound bot") {
  auto r = typecheck_term({}, tm::unit());
  CHECK(r.ty->kind == TypeKind::Unit);
  CHECK(r.bound.is_bot());
}

TEST_CASE("a sending lambda gets the priority of its channel") {
  TypeEnv env;
  env.add("y", ty::send(0, ty::unit(), ty::end_send(1)));
  auto m = tm::lam("x", tm::app(Const::Send, tm::pair(tm::var("x"), tm::var("y"))), ty::unit());
  auto r = typecheck_term(env, m);
  REQUIRE(r.ty->kind == TypeKind::Fn);
  CHECK(r.ty->p == PriorityBound::fin(0));
  CHECK(r.ty->q == PriorityBound::fin(0));
  CHECK(type_equal(r.ty->b, ty::end_send(1)));
  CHECK(r.bound.is_bot());
}

TEST_CASE("deadlocked main thread is a priority violation") {
  TypeEnv env;
  env.add("x", ty::send(0, ty::unit(), ty::end_send(2)));
  env.add("y'", ty::recv(1, ty::unit(), ty::end_recv(3)));
  auto m = elaborate(parse_term("let ((), y') = recv y' in let x = send ((), x) in close x; wait y'"));
  CHECK(kind_of([&] { typecheck_term(env, m); }) == ErrorKind::PriorityViolation);

  // the other order is fine under the same priorities
  auto ok = elaborate(parse_term("let x = send ((), x) in let ((), y') = recv y' in close x; wait y'"));
  CHECK(typecheck_term(env, ok).ty->kind == TypeKind::Unit);
}

TEST_CASE("constant schemas") {
  auto c = instantiate_constant(Const::Close, ty::end_send(7));
  REQUIRE(c->kind == TypeKind::Fn);
  CHECK(c->p.is_top());
  CHECK(c->q == PriorityBound::fin(7));
  CHECK(type_equal(c->a, ty::end_send(7)));
  CHECK(c->b->kind == TypeKind::Unit);

  auto pair = ty::prod(ty::end_send(0), ty::end_recv(0));
  auto l = instantiate_constant(Const::Link, pair);
  CHECK(l->p.is_top());
  CHECK(l->q.is_bot());
  CHECK(type_equal(l->a, pair));

  CHECK(kind_of([] { instantiate_constant(Const::Link, ty::prod(ty::end_send(0), ty::end_send(0))); }) ==
        ErrorKind::DualityMismatch);
}

TEST_CASE("configuration flags") {
  CHECK(typecheck_config({}, cf::child(tm::unit())).flag == Flag::Child);
  CHECK(typecheck_config({}, cf::main(tm::unit())).flag == Flag::Main);
  auto two = cf::par(cf::main(tm::unit()), cf::main(tm::unit()));
  CHECK(kind_of([&] { typecheck_config({}, two); }) == ErrorKind::MainMainClash);
}

TEST_CASE("children must return unit") {
  auto c = cf::par(cf::child(tm::pair(tm::unit(), tm::unit())), cf::main(tm::unit()));
  CHECK(kind_of([&] { typecheck_config({}, c); }) == ErrorKind::TypeMismatch);
}

TEST_CASE("linearity") {
  TypeEnv env;
  env.add("x", ty::end_send(0));
  CHECK(kind_of([&] { check("close x; close x", env); }) == ErrorKind::NonLinearUse);
  CHECK(kind_of([&] { check("()", env); }) == ErrorKind::NonLinearUse);
  CHECK(kind_of([&] { check("close z"); }) == ErrorKind::UnboundName);
  CHECK(check("close x", env).env_used.size() == 1);
}

TEST_CASE("new needs a session type") {
  CHECK(kind_of([] { check("let (x, y) = new () in ()"); }) == ErrorKind::MissingAnnotation);
  CHECK(kind_of([] { check("let (x, y) = new[!1 1 . end! 1] () in close (send ((), x)); let ((), y) = recv y in wait y"); }) ==
        ErrorKind::IllFormedType);
}

TEST_CASE("restrictions check endpoints at dual types") {
  auto c = parse_config("(nu x y : end! 0) (child close x || main wait y)");
  CHECK(typecheck_config({}, c).flag == Flag::Main);
  auto bad = parse_config("(nu x y : end! 0) (child close x || main close y)");
  CHECK_THROWS_AS(typecheck_config({}, bad), TypeError);
}

TEST_CASE("unannotated restrictions are inferred from a binder") {
  auto c = elaborate(parse_config("(nu x y) (child (\\(a : end! 0). close a) x || main wait y)"));
  CHECK(typecheck_config({}, c).flag == Flag::Main);
}

TEST_CASE("derivations replay") {
  auto m = elaborate(parse_term(corpus_file("cycle.pgv")));
  auto r = typecheck_term({}, m, nullptr, true);
  REQUIRE(r.derivation);
  CHECK(replay(*r.derivation));
  CHECK_FALSE(to_string(*r.derivation).empty());
}

TEST_CASE("values are done communicating") {
  const char* vals[] = {"()", "((), ())", "\\(x : 1). x", "inl[1 + 1] ()", "\\(x : end! 3). close x"};
  for (auto s : vals) {
    auto r = check(s);
    CHECK_MESSAGE(r.bound.is_bot(), s);
    CHECK_MESSAGE(minpr(r.env_used) == minpr(r.ty), s);
  }
  TypeEnv env;
  env.add("x", ty::end_send(4));
  auto r = check("((), x)", env);
  CHECK(r.bound.is_bot());
  CHECK(minpr(r.env_used) == minpr(r.ty));
}

TEST_CASE("sum injections need matching minimal priorities") {
  CHECK_NOTHROW(check("inl[1 + 1] ()"));
  TypeEnv env;
  env.add("x", ty::end_send(1));
  CHECK(kind_of([&] { check("inl[end! 1 + end! 2] x", env); }) == ErrorKind::PriorityViolation);
}
