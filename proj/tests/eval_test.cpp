#include <doctest.h>

#include <map>

#include "pgv/eval.hpp"
#include "pgv/parse.hpp"
#include "pgv/testkit.hpp"
#include "pgv/typecheck.hpp"
#include "support.hpp"

using namespace pgv;

namespace {

ConfP program(const std::string& src) {
  auto p = parse_program(src);
  if (auto t = std::get_if<TermP>(&p)) return cf::main(elaborate(*t));
  return elaborate(std::get<ConfP>(p));
}

std::map<std::string, int> rule_counts(const Trace& t) {
  std::map<std::string, int> m;
  for (auto& s : t.steps) ++m[s.label.rule];
  return m;
}

}  // namespace

TEST_CASE("term reduction") {
  auto id = parse_term("(\\(x : 1). x) ()");
  auto r = reduce_term_step(id);
  REQUIRE(r);
  CHECK(r->first->kind == TermKind::Unit);
  CHECK(r->second.rule == "E-Lam");

  auto lp = elaborate(parse_term("let (x, y) = ((), ()) in y; x"));
  auto p = reduce_term_step(lp);
  REQUIRE(p);
  CHECK(p->second.rule == "E-Pair");
  CHECK(alpha_equal(p->first, tm::seq(tm::unit(), tm::unit())));

  auto c = parse_term("case inl[1 + 1] () { inl x -> x ; inr y -> y }");
  auto q = reduce_term_step(c);
  REQUIRE(q);
  CHECK(q->second.rule == "E-Inl");
  CHECK(q->first->kind == TermKind::Unit);
}

TEST_CASE("term reduction is deterministic") {
  auto m = elaborate(parse_term("let x = (\\(a : 1). a) () in (\\(b : 1). b) x"));
  for (int i = 0; i < 3; ++i) {
    auto a = reduce_term_step(m), b = reduce_term_step(m);
    REQUIRE(a);
    REQUIRE(b);
    CHECK(alpha_equal(a->first, b->first));
    m = a->first;
  }
}

TEST_CASE("values and ready terms") {
  auto lam = parse_term("\\(x : 1). x");
  CHECK(is_value(lam));
  CHECK_FALSE(is_ready(lam).ready);

  auto r = is_ready(tm::seq(tm::app(Const::Recv, tm::var("x")), tm::unit()));
  CHECK(r.ready);
  REQUIRE(r.acts_on);
  CHECK(*r.acts_on == "x");

  auto app = parse_term("(\\(x : 1). x) ()");
  CHECK_FALSE(is_value(app));
  CHECK_FALSE(is_ready(app).ready);
}

TEST_CASE("congruence") {
  auto c = cf::main(tm::var("z"));
  CHECK(congruent(cf::par(c, cf::child(tm::unit())), c));

  auto linked = cf::res("x", "y", cf::child(tm::app(Const::Link, tm::pair(tm::var("x"), tm::var("y")))));
  CHECK(congruent(linked, cf::child(tm::unit())));

  auto a = cf::child(tm::app(Const::Close, tm::var("x")));
  auto b = cf::main(tm::app(Const::Wait, tm::var("y")));
  CHECK(congruent(cf::par(a, b), cf::par(b, a)));
  CHECK(congruent(cf::res("x", "y", cf::par(a, b)), cf::res("y", "x", cf::par(a, b))));
  CHECK_FALSE(congruent(cf::main(tm::unit()), cf::child(tm::unit())));

  auto w = cf::child(tm::app(Const::Close, tm::var("w")));
  auto inner = cf::res("x", "y", cf::par(w, cf::par(a, b)));
  auto outer = cf::par(w, cf::res("x", "y", cf::par(a, b)));
  CHECK(congruent(inner, outer));
  CHECK(is_canonical_form(congruence_normalize(outer)));
}

TEST_CASE("configuration steps") {
  auto n = enabled_steps(cf::main(elaborate(parse_term("let (x, y) = new[end! 0] () in close x; wait y"))));
  REQUIRE(n.size() == 1);
  CHECK(n[0].first.rule == "E-New");
  CHECK(n[0].second->kind == ConfKind::Res);

  auto s = enabled_steps(program(
      "(nu x y : !0 1 . end! 1) (child close (send ((), x)) || main let ((), y) = recv y in wait y)"));
  REQUIRE(s.size() == 1);
  CHECK(s[0].first.rule == "E-Send");

  auto cw = program("(nu x y : end? 0) (child wait x; () || main close y; ())");
  auto c = enabled_steps(cw);
  REQUIRE(c.size() == 1);
  CHECK(c[0].first.rule == "E-Close");
  CHECK(congruent(c[0].second, program("child (); () || main (); ()")));
  CHECK(is_canonical_form(cw));
  CHECK_FALSE(is_normal_form(cw));
}

TEST_CASE("link forwards the peer to the other endpoint") {
  auto c = program("(nu x y : end! 0) (nu w z : end? 0) (child link (x, w) || child close y; () || main wait z)");
  auto [out, tr] = run(c, SchedulerPolicy::min_priority(), 100);
  CHECK(out.kind == RunOutcome::Kind::Value);
  CHECK(rule_counts(tr)["E-Link"] == 1);
  CHECK(rule_counts(tr)["E-Close"] == 1);

  auto m = program("(nu x y : end! 0) (nu w z : end? 0) (main link (x, w); () || child close y || child wait z)");
  auto [out2, tr2] = run(m, SchedulerPolicy::min_priority(), 100);
  CHECK(out2.kind == RunOutcome::Kind::Value);
}

TEST_CASE("runs") {
  auto [u, t] = run(cf::main(tm::unit()), SchedulerPolicy::min_priority(), 10);
  CHECK(u.kind == RunOutcome::Kind::Value);
  CHECK(t.steps.empty());
  CHECK(is_normal_form(cf::main(tm::unit())));

  auto [v, tv] = run(program(corpus_file("cycle.pgv")), SchedulerPolicy::min_priority(), 1000);
  REQUIRE(v.kind == RunOutcome::Kind::Value);
  CHECK(v.value->kind == TermKind::Unit);

  auto [f, tf] = run(program(corpus_file("cycle.pgv")), SchedulerPolicy::min_priority(), 2);
  CHECK(f.kind == RunOutcome::Kind::FuelExhausted);
  CHECK(tf.steps.size() == 2);
}

TEST_CASE("echo ends in the expected normal form") {
  auto [out, tr] = run(program(corpus_file("echo.pgv")), SchedulerPolicy::min_priority(), 1000);
  REQUIRE(out.kind == RunOutcome::Kind::NormalForm);
  auto expect = program(
      "(nu x x' : ?0 1 . !1 1 . end! 2) "
      "(child let (y, x) = recv x in let x = send (y, x) in close x || main x')");
  CHECK(congruent(out.config, expect));
  CHECK(is_normal_form(expect));
}

TEST_CASE("every step of the cycle example retypes") {
  auto c = program(corpus_file("cycle.pgv"));
  run(c, SchedulerPolicy::min_priority(), 1000, [](const TraceStep& s) {
    CHECK(typecheck_config({}, s.config).flag == Flag::Main);
  });
}

TEST_CASE("typing survives congruence normalization") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    testkit::GenBudget b;
    b.seed = seed;
    auto c = testkit::gen_pgv_config(b);
    run(c, SchedulerPolicy::random(seed), 1000, [](const TraceStep& s) {
      auto f = typecheck_config({}, s.config).flag;
      CHECK(typecheck_config({}, congruence_normalize(s.config)).flag == f);
    });
  }
}

TEST_CASE("corpus outcome does not depend on the schedule") {
  for (auto name : {"cycle.pgv", "echo.pgv", "milner3.pgv"}) {
    auto c = program(corpus_file(name));
    auto [ref, t0] = run(c, SchedulerPolicy::min_priority(), 5000);
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      auto [o, t] = run(c, SchedulerPolicy::random(seed), 5000);
      CHECK_MESSAGE(congruent(o.config, ref.config), name << " seed " << seed);
    }
  }
}

TEST_CASE("policies parse") {
  CHECK(parse_policy("min-priority")->kind == SchedulerPolicy::Kind::MinPriorityFirst);
  auto r = parse_policy("random:7");
  REQUIRE(r);
  CHECK(r->seed == 7);
  CHECK(parse_policy("exhaustive:5")->depth == 5);
  CHECK_FALSE(parse_policy("fastest").has_value());
}

TEST_CASE("traces serialize") {
  auto [o, t] = run(program(corpus_file("cycle.pgv")), SchedulerPolicy::min_priority(), 1000);
  auto j = trace_to_json(t);
  CHECK(j.find("E-Close") != std::string::npos);
  CHECK(j == trace_to_json(t));
}

TEST_CASE("canonical keys agree on reordered soups") {
  auto c = program("(nu x y : end! 0) (nu u v : end! 1) (child close x || child wait y || child close u || main wait v)");
  auto d = program("(nu u v : end! 1) (nu x y : end! 0) (main wait v || child close u || child wait y || child close x)");
  CHECK(congruent(c, d));
  CHECK(canonical_key(c) == canonical_key(d));
}

namespace {

void collect(const ConfP& c, TypeEnv& env, std::vector<TermP>& threads) {
  switch (c->kind) {
    case ConfKind::Thread: threads.push_back(c->term); break;
    case ConfKind::Par:
      collect(c->c, env, threads);
      collect(c->d, env, threads);
      break;
    case ConfKind::Res:
      if (c->ann) {
        env.add(c->x, c->ann);
        env.add(c->y, dual(c->ann));
      }
      collect(c->c, env, threads);
      break;
  }
}

}  // namespace

TEST_CASE("a thread ready on an endpoint has a finite priority bound") {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    testkit::GenBudget b;
    b.seed = seed;
    run(testkit::gen_pgv_config(b), SchedulerPolicy::min_priority(), 1000, [&](const TraceStep& s) {
      TypeEnv all;
      std::vector<TermP> threads;
      collect(s.config, all, threads);
      for (auto& t : threads) {
        auto r = is_ready(t);
        if (!r.ready || !r.acts_on) continue;
        TypeEnv mine;
        for (auto& n : free_names(t))
          if (all.contains(n)) mine.add(n, all.lookup(n));
        auto typing = try_typecheck_term(mine, t);
        auto ok = std::get_if<TermTyping>(&typing);
        REQUIRE_MESSAGE(ok, to_string(t));
        ++checked;
        CHECK_MESSAGE(ok->bound.is_fin(), to_string(t));
      }
    });
  }
  CHECK(checked > 100);
}
