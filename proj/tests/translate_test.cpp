#include <doctest.h>

#include <map>

#include "pgv/eval.hpp"
#include "pgv/parse.hpp"
#include "pgv/testkit.hpp"
#include "pgv/translate.hpp"
#include "pgv/typecheck.hpp"
#include "support.hpp"

using namespace pgv;
using namespace pgv::translate;
namespace P = pgv::pcp;

namespace {

P::PcpEnv env_of(std::initializer_list<std::pair<Name, P::PTypeP>> xs) {
  P::PcpEnv e;
  for (auto& [n, t] : xs) e.add(n, t);
  return e;
}

void preserved(const P::PcpEnv& env, const P::ProcP& p) {
  auto m = translate_term(env, p);
  auto r = typecheck_term(translate_env(env), m);
  CHECK(r.ty->kind == TypeKind::Unit);
  auto c = translate_config(env, p);
  CHECK(typecheck_config(translate_env(env), c).flag == Flag::Child);
}

const char* corpus_pcp[] = {"close.pcp", "delegate.pcp", "choice.pcp", "forward.pcp",
                            "unbound.pcp", "milner2.pcp", "milner3.pcp", "milner4.pcp"};

}  // namespace

TEST_CASE("type translation") {
  CHECK(type_equal(translate_type(P::pty::one(3)), ty::end_send(3)));
  CHECK(type_equal(translate_type(P::pty::bot(3)), ty::end_recv(3)));
  auto t = translate_type(P::pty::parr(0, P::pty::one(1), P::pty::bot(2)));
  CHECK(type_equal(t, parse_type("?0 end! 1 . end? 2")));
  auto s = translate_type(P::pty::tensor(0, P::pty::one(1), P::pty::bot(2)));
  CHECK(type_equal(s, parse_type("!0 end? 1 . end? 2")));
  CHECK(type_equal(translate_type(P::pty::plus(0, P::pty::one(2), P::pty::one(2))),
                   ty::select(0, ty::end_send(2), ty::end_send(2))));
  CHECK(type_equal(translate_type(P::pty::nil(1)), ty::select_empty(1)));
  CHECK(type_equal(translate_type(P::pty::top(1)), ty::offer_empty(1)));
}

TEST_CASE("translation commutes with duality on the table rows") {
  auto a = P::pty::one(3), b = P::pty::bot(4);
  for (auto k : {P::TKind::Tensor, P::TKind::Parr, P::TKind::Plus, P::TKind::With}) {
    auto t = P::pty::make(k, 1, a, b);
    CHECK(type_equal(translate_type(P::dual(t)), dual(translate_type(t))));
  }
}

TEST_CASE("term translation") {
  CHECK(translate_term({}, P::pp::halt())->kind == TermKind::Unit);

  auto env = env_of({{"x", P::pty::one(0)}, {"y", P::pty::bot(0)}});
  auto l = translate_term(env, P::pp::link("x", "y"));
  REQUIRE(l->kind == TermKind::App);
  CHECK(l->kids[0]->k == Const::Link);
  CHECK(alpha_equal(l->kids[1], tm::pair(tm::var("x"), tm::var("y"))));

  auto senv = env_of({{"x", P::parse_type("bot^1 *^0 one^2")}});
  auto s = translate_term(senv, P::parse_process("x[y].(y().halt || x[].halt)"));
  auto text = to_string(s);
  CHECK(text.find("new") != std::string::npos);
  CHECK(text.find("send") != std::string::npos);
  preserved(senv, P::parse_process("x[y].(y().halt || x[].halt)"));
}

TEST_CASE("configuration translation") {
  auto par = translate_config({}, P::pp::par(P::pp::halt(), P::pp::halt()));
  CHECK(par->kind == ConfKind::Par);

  auto cenv = env_of({{"x", P::pty::one(0)}});
  auto cl = translate_config(cenv, P::parse_process("x[].halt"));
  REQUIRE(cl->kind == ConfKind::Thread);
  CHECK(cl->flag == Flag::Child);

  auto ienv = env_of({{"x", P::parse_type("one^2 +^0 one^2")}});
  auto inl = translate_config(ienv, P::parse_process("x[inl].x[].halt"));
  REQUIRE(inl->kind == ConfKind::Res);
  CHECK(inl->c->kind == ConfKind::Thread);
  CHECK(to_string(inl->c->term).find("inl") != std::string::npos);
  preserved(ienv, P::parse_process("x[inl].x[].halt"));
}

TEST_CASE("M and C agree") {
  auto h = check_M_to_C({}, P::pp::halt());
  CHECK(h.equal);

  auto r = check_M_to_C({}, P::parse_process("(nu x y : one^0) (x[].halt || y().halt)"));
  CHECK_FALSE(r.equal);
  CHECK(r.steps >= 1);

  auto one = check_M_to_C(env_of({{"x", P::pty::one(0)}, {"y", P::pty::one(1)}}),
                          P::parse_process("x[].halt || y[].halt"));
  CHECK_FALSE(one.equal);
  CHECK(one.steps >= 1);
}

TEST_CASE("translation preserves typing on the corpus") {
  for (auto name : corpus_pcp) {
    INFO(name);
    preserved({}, P::parse_process(corpus_file(name)));
    CHECK_NOTHROW(check_M_to_C({}, P::parse_process(corpus_file(name))));
  }
}

TEST_CASE("translation preserves typing on generated processes") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    testkit::GenBudget b;
    b.seed = seed;
    INFO("seed " << seed);
    preserved({}, testkit::gen_pcp_process(b));
  }
}

TEST_CASE("choices need a priority gap of two") {
  auto p = P::parse_process("(nu x y : one^1 +^0 one^1) (x[inl].x[].halt || y case {y().halt; y().halt})");
  CHECK_NOTHROW(P::typecheck({}, p));
  CHECK_THROWS_AS(typecheck_config({}, translate_config({}, p)), TypeError);

  auto q = P::parse_process("(nu x y : one^2 +^0 one^2) (x[inl].x[].halt || y case {y().halt; y().halt})");
  preserved({}, q);
}

TEST_CASE("correspondence on a single close") {
  auto p = P::parse_process(corpus_file("close.pcp"));
  auto c = check_completeness({}, p, {10, 20000});
  REQUIRE(c.edges.size() == 1);
  CHECK(c.edges[0].status == EdgeStatus::Matched);
  bool closed = false;
  for (auto& l : c.edges[0].path) closed |= l.rule == "E-Close";
  CHECK(closed);
  auto s = check_soundness({}, p, {10, 20000});
  CHECK(s.count(EdgeStatus::Mismatch) == 0);

  auto h = check_completeness({}, P::pp::halt());
  CHECK(h.edges.empty());
}

TEST_CASE("correspondence for the scheduler") {
  auto p = milner_pcp(2);
  auto c = check_completeness({}, p);
  auto s = check_soundness({}, p);
  CHECK(c.count(EdgeStatus::Matched) == static_cast<int>(c.edges.size()));
  CHECK(s.count(EdgeStatus::Matched) == static_cast<int>(s.edges.size()));
  CHECK_FALSE(report_to_json({c, s}).empty());
}

TEST_CASE("a tiny search bound is reported as inconclusive") {
  auto p = P::parse_process(corpus_file("delegate.pcp"));
  auto c = check_completeness({}, p, {1, 20000});
  CHECK(c.count(EdgeStatus::Mismatch) == 0);
  CHECK(c.count(EdgeStatus::ExceededBound) > 0);
}

TEST_CASE("the translated scheduler is the hand-written one") {
  for (int n : {2, 3, 4}) {
    INFO("n = " << n);
    auto pcp = milner_pcp(n);
    auto hand = elaborate(std::get<ConfP>(parse_program(milner_pgv_source(n))));
    CHECK(congruent(strip_unit_tails(translate_config({}, pcp)), strip_unit_tails(hand)));
    CHECK(typecheck_config({}, hand).flag == Flag::Main);
  }
  CHECK(milner_pcp_source(3) == corpus_file("milner3.pcp"));
}
