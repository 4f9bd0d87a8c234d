#include <doctest.h>

#include <set>

#include "pgv/eval.hpp"
#include "pgv/parse.hpp"
#include "pgv/testkit.hpp"
#include "pgv/typecheck.hpp"
#include "support.hpp"

using namespace pgv;
using namespace pgv::testkit;

TEST_CASE("the smallest budget gives the smallest program") {
  GenBudget b;
  b.max_depth = 1;
  auto c = gen_pgv_config(b);
  REQUIRE(c->kind == ConfKind::Thread);
  CHECK(c->flag == Flag::Main);
  CHECK(c->term->kind == TermKind::Unit);

}

TEST_CASE("no sessions gives an endpoint-free program") {
  GenBudget b;
  b.max_sessions = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    b.seed = seed;
    auto src = gen_pgv_source(b);
    INFO(src);
    CHECK(src.find("new") == std::string::npos);
    auto [out, tr] = run(gen_pgv_config(b), SchedulerPolicy::random(seed), 1000);
    CHECK(out.kind == RunOutcome::Kind::Value);
  }
}

TEST_CASE("one session gives one exchange") {
  GenBudget b;
  b.max_sessions = 1;
  b.max_depth = 2;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    b.seed = seed;
    auto src = gen_pgv_source(b);
    INFO(src);
    CHECK(src.find("new") != std::string::npos);
    CHECK_NOTHROW(typecheck_config({}, gen_pgv_config(b)));
  }
}

TEST_CASE("generators are deterministic in the seed") {
  GenBudget b;
  b.seed = 17;
  CHECK(gen_pgv_source(b) == gen_pgv_source(b));
  CHECK(gen_pcp_source(b) == gen_pcp_source(b));
  GenBudget c = b;
  c.seed = 18;
  CHECK(gen_pgv_source(b) != gen_pgv_source(c));
}

TEST_CASE("generated programs typecheck") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    GenBudget b;
    b.seed = seed;
    INFO("seed " << seed);
    CHECK(typecheck_config({}, gen_pgv_config(b)).flag == Flag::Main);
    CHECK_NOTHROW(pcp::typecheck({}, gen_pcp_process(b)));
  }
}

TEST_CASE("holes are listed in order of appearance") {
  auto p = parse_program(corpus_file("cycle.skel.pgv"));
  CHECK(holes_of(p) == std::vector<std::string>{"o", "q", "o'", "q'"});
  auto filled = fill_holes(p, {{"o", 0}, {"q", 2}, {"o'", 1}, {"q'", 2}});
  CHECK(holes_of(filled).empty());
  CHECK_NOTHROW(check_program(filled));
}

TEST_CASE("ping annotation") {
  auto r = find_annotations(corpus_file("ping.skel.pgv"), 4);
  REQUIRE(r.sat);
  CHECK(r.assignment == std::map<std::string, int>{{"a", 0}, {"b", 1}});
}

TEST_CASE("cycle example has an annotation") {
  auto r = find_annotations(corpus_file("cycle.skel.pgv"), 4);
  REQUIRE(r.sat);
  auto filled = fill_holes(parse_program(corpus_file("cycle.skel.pgv")), r.assignment);
  CHECK_NOTHROW(check_program(filled));
  // the checked-in corpus file carries exactly this assignment
  auto checked_in = parse_program(corpus_file("cycle.pgv"));
  CHECK(alpha_equal(std::get<TermP>(checked_in), std::get<TermP>(filled)));
  auto other = fill_holes(parse_program(corpus_file("cycle.skel.pgv")), {{"o", 0}, {"q", 3}, {"o'", 1}, {"q'", 2}});
  CHECK_FALSE(alpha_equal(std::get<TermP>(checked_in), std::get<TermP>(other)));
  CHECK(r.assignment == std::map<std::string, int>{{"o", 0}, {"q", 2}, {"o'", 1}, {"q'", 2}});
}

TEST_CASE("deadlock example has none") {
  auto r = find_annotations(corpus_file("deadlock.skel.pgv"), 4);
  CHECK_FALSE(r.sat);
  CHECK(r.tried == 625);
  CHECK(std::set<std::string>(r.witness.begin(), r.witness.end()) ==
        std::set<std::string>{"o < o'", "o' < o"});
}

TEST_CASE("k bounds the search") {
  auto r = find_annotations(corpus_file("cycle.skel.pgv"), 1);
  CHECK_FALSE(r.sat);
  CHECK(r.tried == 16);
}

TEST_CASE("shrinking keeps the failure and the typing") {
  auto fails = [](const GenBudget& b) { return gen_pgv_source(b).find("send") != std::string::npos; };
  GenBudget start;
  std::uint64_t seed = 1;
  while (!fails(start)) start.seed = ++seed;
  auto small = shrink(start, fails);
  CHECK(fails(small));
  CHECK(small.max_depth + small.max_sessions < start.max_depth + start.max_sessions);
  CHECK(small.max_sessions >= 1);
  CHECK_NOTHROW(typecheck_config({}, gen_pgv_config(small)));
}
