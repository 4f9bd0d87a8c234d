#include <doctest.h>

#include "pgv/pcp.hpp"
#include "pgv/testkit.hpp"
#include "support.hpp"

using namespace pgv;
using namespace pgv::pcp;

namespace {

ErrorKind kind_of(const PcpEnv& env, const ProcP& p) {
  try {
    typecheck(env, p);
  } catch (const TypeError& e) {
    return e.kind;
  }
  FAIL("expected a type error");
  return ErrorKind::TypeMismatch;
}

PcpEnv env_of(std::initializer_list<std::pair<Name, PTypeP>> xs) {
  PcpEnv e;
  for (auto& [n, t] : xs) e.add(n, t);
  return e;
}

const char* corpus_pcp[] = {"close.pcp", "delegate.pcp", "choice.pcp", "forward.pcp",
                            "unbound.pcp", "milner2.pcp", "milner3.pcp", "milner4.pcp"};

}  // namespace

TEST_CASE("pcp duality") {
  CHECK(type_equal(dual(pty::one(0)), pty::bot(0)));
  CHECK(type_equal(dual(pty::tensor(0, pty::one(1), pty::bot(2))),
                   pty::parr(0, pty::bot(1), pty::one(2))));
  auto w = pty::with(3, pty::top(4), pty::nil(5));
  CHECK(type_equal(dual(dual(w)), w));
  CHECK(pr(dual(w)) == pr(w));
}

TEST_CASE("pcp priorities") {
  CHECK(pr(pty::plus(2, pty::one(3), pty::one(4))).value == 2);
  CHECK(minpr(PcpEnv{}).is_top());
  CHECK(minpr(env_of({{"x", pty::one(1)}, {"y", pty::bot(6)}})) == PriorityBound::fin(1));
}

TEST_CASE("pcp types parse and print") {
  for (auto s : {"one^1 *^0 bot^2", "(one^4 +^2 one^4) *^0 bot^6", "top^3 &^1 zero^2", "bot^0 |^0 one^1"}) {
    auto t = pcp::parse_type(s);
    CHECK_MESSAGE(type_equal(pcp::parse_type(to_string(t)), t), s);
  }
  CHECK(check_well_formed(pcp::parse_type("one^0 *^1 bot^2")).has_value());
}

TEST_CASE("pcp typing") {
  CHECK_NOTHROW(typecheck({}, pp::halt()));
  CHECK_NOTHROW(typecheck(env_of({{"x", pty::one(0)}, {"y", pty::bot(0)}}), pp::link("x", "y")));
  auto p = pp::close("x", pp::wait("y", pp::halt()));
  CHECK(kind_of(env_of({{"x", pty::one(2)}, {"y", pty::bot(1)}}), p) == ErrorKind::PriorityViolation);
  CHECK_NOTHROW(typecheck(env_of({{"x", pty::one(0)}, {"y", pty::bot(1)}}), p));
  CHECK(kind_of(env_of({{"x", pty::one(0)}, {"y", pty::one(0)}}), pp::link("x", "y")) ==
        ErrorKind::DualityMismatch);
}

TEST_CASE("pcp linearity") {
  CHECK(kind_of(env_of({{"x", pty::one(0)}}), pp::halt()) == ErrorKind::NonLinearUse);
  CHECK(kind_of({}, pp::close("x", pp::halt())) == ErrorKind::UnboundName);
}

TEST_CASE("absurd consumes everything") {
  auto env = env_of({{"x", pty::top(0)}, {"y", pty::one(3)}});
  CHECK_NOTHROW(typecheck(env, pp::absurd("x")));
}

TEST_CASE("unbound send types like its expansion") {
  auto env = env_of({{"x", pcp::parse_type("one^2 *^0 one^4")}, {"a", pty::bot(2)}});
  auto p = parse_process("x<a>.x[].halt");
  CHECK(p->kind == PKind::USend);
  CHECK_NOTHROW(typecheck(env, p));
  CHECK_NOTHROW(typecheck(env, expand_sugar(p)));

  auto bad = env_of({{"x", pcp::parse_type("one^2 *^0 one^4")}, {"a", pty::bot(3)}});
  CHECK_THROWS_AS(typecheck(bad, p), TypeError);
  CHECK_THROWS_AS(typecheck(bad, expand_sugar(p)), TypeError);
}

TEST_CASE("pcp steps") {
  auto p = parse_process("(nu x y : one^0) (x[].halt || y().halt)");
  auto s = step(p);
  REQUIRE(s.size() == 1);
  CHECK(s[0].rule == "E-Close");
  CHECK(canonical_key(s[0].result) == canonical_key(pp::par(pp::halt(), pp::halt())));

  auto l = parse_process("(nu x y : one^0) (w <-> x || y().halt)");
  auto ls = step(l);
  REQUIRE(ls.size() == 1);
  CHECK(ls[0].rule == "E-Link");
  CHECK(canonical_key(ls[0].result) == canonical_key(pp::wait("w", pp::halt())));

  CHECK(step(pp::halt()).empty());
}

TEST_CASE("free actions never fire") {
  CHECK(step(parse_process("x[].halt || y().halt")).empty());
}

TEST_CASE("canonical forms") {
  auto act = parse_process("x[].halt");
  CHECK(canonical_key(canonicalize(pp::par(act, pp::halt()))) == canonical_key(canonicalize(act)));
  CHECK(canonicalize(parse_process("(nu x y : one^0) x <-> y"))->kind == PKind::Halt);
  auto soup = parse_process("(nu x y : one^0) (x[].halt || y().halt)");
  CHECK(is_canonical(soup));
  CHECK(to_string(canonicalize(soup)) == to_string(soup));
  CHECK_FALSE(is_canonical(parse_process("(nu x y : one^0) ((nu a b : one^1) (a[].halt || b().halt) || x[].y().halt)")));
}

TEST_CASE("pcp runs") {
  auto h = run(pp::halt(), 10);
  CHECK(h.kind == PcpRun::Kind::Halt);
  CHECK(h.trace.empty());

  auto c = run(parse_process(corpus_file("close.pcp")), 10);
  CHECK(c.kind == PcpRun::Kind::Halt);
  CHECK(c.trace.size() == 1);

  auto m = run(parse_process(corpus_file("milner3.pcp")), 1000);
  CHECK(m.kind == PcpRun::Kind::Halt);
  CHECK(m.trace.size() == 10);
}

TEST_CASE("pcp corpus typechecks and halts under every schedule") {
  for (auto name : corpus_pcp) {
    auto p = parse_process(corpus_file(name));
    CHECK_NOTHROW(typecheck({}, p));
    for (std::uint64_t seed = 0; seed <= 20; ++seed)
      CHECK_MESSAGE(run(p, 1000, seed).kind == PcpRun::Kind::Halt, name << " seed " << seed);
  }
}

TEST_CASE("pcp subject reduction and progress on generated processes") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    testkit::GenBudget b;
    b.seed = seed;
    auto p = testkit::gen_pcp_process(b);
    REQUIRE_NOTHROW(typecheck({}, p));
    auto cur = canonicalize(p);
    for (int i = 0; i < 200 && cur->kind != PKind::Halt; ++i) {
      auto next = step(cur);
      REQUIRE_MESSAGE(!next.empty(), "seed " << seed << " stuck at " << to_string(cur));
      for (auto& s : next) CHECK_NOTHROW(typecheck({}, s.result));
      cur = canonicalize(next[seed % next.size()].result);
    }
    CHECK(cur->kind == PKind::Halt);
  }
}

TEST_CASE("canonical keys ignore bound names and order") {
  auto a = parse_process("(nu x y : one^0) (x[].halt || y().halt)");
  auto b = parse_process("(nu q p : bot^0) (p[].halt || q().halt)");
  CHECK(canonical_key(a) == canonical_key(b));
  auto c = parse_process("(nu x y : one^0) (x[].halt || y().halt) || (nu u v : one^1) (u[].halt || v().halt)");
  auto d = parse_process("(nu u v : one^1) (nu x y : one^0) (v().halt || x[].halt || u[].halt || y().halt)");
  CHECK(canonical_key(c) == canonical_key(d));
}

TEST_CASE("pcp traces serialize") {
  auto p = parse_process(corpus_file("milner2.pcp"));
  auto r = run(p, 100);
  auto j = trace_to_json(p, r.trace);
  CHECK(j.find("E-Close") != std::string::npos);
}
