#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pgv/eval.hpp"
#include "pgv/parse.hpp"
#include "pgv/pcp.hpp"
#include "pgv/testkit.hpp"
#include "pgv/translate.hpp"
#include "pgv/typecheck.hpp"

using namespace pgv;
namespace P = pgv::pcp;

namespace {

std::string corpus_file(const std::string& name) {
  std::ifstream in(std::string(PGV_CORPUS) + "/" + name);
  if (!in) throw std::runtime_error("missing corpus file " + name);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ConfP program(const std::string& src) {
  auto p = parse_program(src);
  if (auto t = std::get_if<TermP>(&p)) return cf::main(elaborate(*t));
  return elaborate(std::get<ConfP>(p));
}

struct Verdict {
  bool ok = true;
  std::string detail;
  std::vector<std::string> notes;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

int failures = 0;

void report(int n, const char* what, const std::function<Verdict()>& f) {
  Verdict v;
  try {
    v = f();
  } catch (const std::exception& e) {
    v.fail(std::string("exception: ") + e.what());
  }
  if (!v.ok) ++failures;
  std::printf("criterion %d: %s  %s%s%s\n", n, v.ok ? "PASS" : "FAIL", what, v.detail.empty() ? "" : " -- ",
              v.detail.c_str());
  for (auto& s : v.notes) std::fprintf(stderr, "  warning: %s\n", s.c_str());
  std::fflush(stdout);
}

const char* corpus_pcp[] = {"close.pcp", "delegate.pcp", "choice.pcp", "forward.pcp",
                            "unbound.pcp", "milner2.pcp", "milner3.pcp", "milner4.pcp"};

// ---------------------------------------------------------------- oracles

// Session duality computed directly on the structure: every send becomes a
// receive and back, payloads stay as they are.
TypeP oracle_dual(const TypeP& s) {
  switch (s->kind) {
    case TypeKind::Send: return ty::recv(s->o, s->a, oracle_dual(s->b));
    case TypeKind::Recv: return ty::send(s->o, s->a, oracle_dual(s->b));
    case TypeKind::EndS: return ty::end_recv(s->o);
    case TypeKind::EndR: return ty::end_send(s->o);
    default: throw std::logic_error("not a session type");
  }
}

bool oracle_equal(const TypeP& a, const TypeP& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TypeKind::Unit:
    case TypeKind::Void: return true;
    case TypeKind::EndS:
    case TypeKind::EndR: return a->o.value == b->o.value;
    case TypeKind::Send:
    case TypeKind::Recv: return a->o.value == b->o.value && oracle_equal(a->a, b->a) && oracle_equal(a->b, b->b);
    case TypeKind::Fn:
      if (!(a->p == b->p) || !(a->q == b->q)) return false;
      [[fallthrough]];
    case TypeKind::Prod:
    case TypeKind::Sum: return oracle_equal(a->a, b->a) && oracle_equal(a->b, b->b);
  }
  return false;
}

std::vector<P::PTypeP> pcp_types_to_depth(int depth, int max_prio) {
  std::vector<P::PTypeP> leaves;
  for (int o = 0; o <= max_prio; ++o)
    for (auto k : {P::TKind::One, P::TKind::Bot, P::TKind::Nil, P::TKind::Top}) leaves.push_back(P::pty::make(k, o));
  if (depth <= 1) return leaves;
  auto below = pcp_types_to_depth(depth - 1, max_prio);
  std::vector<P::PTypeP> out = leaves;
  for (int o = 0; o <= max_prio; ++o)
    for (auto k : {P::TKind::Tensor, P::TKind::Parr, P::TKind::Plus, P::TKind::With})
      for (auto& a : below)
        for (auto& b : below) out.push_back(P::pty::make(k, o, a, b));
  return out;
}

std::map<std::string, int> comm_rules(const std::vector<std::string>& rules) {
  static const std::set<std::string> comm = {"E-Send", "E-Close", "E-Link"};
  std::map<std::string, int> m;
  for (auto& r : rules)
    if (comm.count(r)) ++m[r];
  return m;
}

// ---------------------------------------------------------------- criteria

Verdict examples() {
  Verdict v;
  auto cyc = program(corpus_file("cycle.pgv"));
  if (typecheck_config({}, cyc).flag != Flag::Main) v.fail("cycle.pgv does not check as a main thread");
  auto [out, tr] = run(cyc, SchedulerPolicy::min_priority(), 1000);
  if (out.kind != RunOutcome::Kind::Value || out.value->kind != TermKind::Unit)
    v.fail("cycle.pgv does not run to ()");

  try {
    typecheck_config({}, program(corpus_file("deadlock.pgv")));
    v.fail("deadlock.pgv was accepted");
  } catch (const TypeError& e) {
    if (e.kind != ErrorKind::PriorityViolation) v.fail(std::string("deadlock.pgv rejected with ") + error_kind_name(e.kind));
  }

  auto cs = testkit::find_annotations(corpus_file("cycle.skel.pgv"), 4);
  if (!cs.sat) v.fail("no annotation found for the cycle skeleton");
  auto filled = testkit::fill_holes(parse_program(corpus_file("cycle.skel.pgv")), cs.assignment);
  if (!alpha_equal(std::get<TermP>(filled), std::get<TermP>(parse_program(corpus_file("cycle.pgv")))))
    v.fail("cycle.pgv does not carry the annotation found by the search");

  auto ds = testkit::find_annotations(corpus_file("deadlock.skel.pgv"), 4);
  std::set<std::string> witness(ds.witness.begin(), ds.witness.end());
  if (ds.sat) v.fail("annotation search found an assignment for the deadlock");
  if (witness != std::set<std::string>{"o < o'", "o' < o"}) v.fail("unexpected unsat witness");

  // independent sweep: no assignment in 0..4 makes the deadlock check
  auto skel = parse_program(corpus_file("deadlock.skel.pgv"));
  auto holes = testkit::holes_of(skel);
  int accepted = 0, tried = 0;
  std::vector<int> a(holes.size(), 0);
  for (;;) {
    std::map<std::string, int> m;
    for (std::size_t i = 0; i < holes.size(); ++i) m[holes[i]] = a[i];
    auto t = std::get<TermP>(testkit::fill_holes(skel, m));
    ++tried;
    if (std::holds_alternative<ConfigTyping>(try_typecheck_config({}, cf::main(elaborate(t))))) ++accepted;
    std::size_t i = 0;
    while (i < a.size() && ++a[i] > 4) a[i++] = 0;
    if (i == a.size()) break;
  }
  if (accepted) v.fail(std::to_string(accepted) + " deadlock annotations accepted by the checker");
  std::ostringstream os;
  os << "cycle annotation";
  for (auto& [k, x] : cs.assignment) os << ' ' << k << '=' << x;
  os << "; deadlock unsat over " << tried << " assignments";
  if (v.ok) v.detail = os.str();
  return v;
}

Verdict subject_reduction() {
  Verdict v;
  int steps = 0, bad = 0;
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    testkit::GenBudget b;
    b.seed = seed;
    auto c = testkit::gen_pgv_config(b);
    try {
      Flag f = typecheck_config({}, c).flag;
      run(c, SchedulerPolicy::min_priority(), 10000, [&](const TraceStep& s) {
        ++steps;
        if (typecheck_config({}, s.config).flag != f) throw std::runtime_error("flag changed");
      });
    } catch (const std::exception& e) {
      if (!bad++) v.fail("seed " + std::to_string(seed) + ": " + e.what());
    }
  }
  if (v.ok) v.detail = "500 programs, " + std::to_string(steps) + " steps retyped";
  else v.detail += " (" + std::to_string(bad) + " failures)";
  return v;
}

Verdict progress() {
  Verdict v;
  int runs = 0, values = 0, normal = 0, endpoint_free = 0, bad = 0;
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    testkit::GenBudget b;
    b.seed = seed;
    auto c = testkit::gen_pgv_config(b);
    for (auto policy : {SchedulerPolicy::min_priority(), SchedulerPolicy::random(seed)}) {
      ++runs;
      try {
        auto [out, tr] = run(c, policy, 10000);
        bool uses_endpoints = false;
        for (auto& s : tr.steps) uses_endpoints |= s.label.rule == "E-New";
        switch (out.kind) {
          case RunOutcome::Kind::Value:
            ++values;
            if (!is_normal_form(out.config)) throw std::runtime_error("value is not a normal form");
            break;
          case RunOutcome::Kind::NormalForm:
            ++normal;
            if (!is_normal_form(out.config)) throw std::runtime_error("terminal state is not a normal form");
            if (!uses_endpoints) throw std::runtime_error("endpoint-free program did not end in a value");
            break;
          case RunOutcome::Kind::FuelExhausted: throw std::runtime_error("fuel exhausted");
        }
        endpoint_free += !uses_endpoints;
      } catch (const std::exception& e) {
        if (!bad++) v.fail("seed " + std::to_string(seed) + ": " + e.what());
      }
    }
  }
  // endpoint-free programs must end as a lone main thread holding a value
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    testkit::GenBudget b;
    b.seed = seed;
    b.max_sessions = 0;
    auto c = testkit::gen_pgv_config(b);
    for (auto policy : {SchedulerPolicy::min_priority(), SchedulerPolicy::random(seed)}) {
      auto [out, tr] = run(c, policy, 10000);
      ++endpoint_free;
      if (out.kind != RunOutcome::Kind::Value || out.config->kind != ConfKind::Thread || !is_value(out.config->term))
        if (!bad++) v.fail("endpoint-free seed " + std::to_string(seed) + " ended in " + to_string(out.config));
    }
  }
  if (v.ok)
    v.detail = std::to_string(runs) + " runs: " + std::to_string(values) + " values, " + std::to_string(normal) +
               " normal forms; " + std::to_string(endpoint_free) + " endpoint-free runs end in a value";
  return v;
}

Verdict echo() {
  Verdict v;
  auto [out, tr] = run(program(corpus_file("echo.pgv")), SchedulerPolicy::min_priority(), 1000);
  auto expect = program(
      "(nu x x' : ?0 1 . !1 1 . end! 2) "
      "(child let (y, x) = recv x in let x = send (y, x) in close x || main x')");
  if (out.kind != RunOutcome::Kind::NormalForm) v.fail("echo did not stop in a normal form");
  else if (!congruent(out.config, expect)) v.fail("final state " + to_string(out.config));
  else v.detail = "after " + std::to_string(tr.steps.size()) + " steps";
  return v;
}

Verdict pcp_progress() {
  Verdict v;
  int steps = 0;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    testkit::GenBudget b;
    b.seed = seed;
    auto p = testkit::gen_pcp_process(b);
    P::typecheck({}, p);
    for (std::uint64_t pick : {std::uint64_t{0}, seed}) {
      auto r = P::run(p, 10000, pick);
      steps += static_cast<int>(r.trace.size());
      if (r.kind != P::PcpRun::Kind::Halt) {
        v.fail("seed " + std::to_string(seed) + " ended in " + P::to_string(r.final));
        return v;
      }
    }
  }
  v.detail = "300 processes, two schedules each, " + std::to_string(steps) + " steps";
  return v;
}

Verdict preservation() {
  Verdict v;
  std::vector<std::pair<std::string, P::ProcP>> procs;
  for (auto name : corpus_pcp) procs.emplace_back(name, P::parse_process(corpus_file(name)));
  for (int n : {2, 3, 4}) procs.emplace_back("milner n=" + std::to_string(n), translate::milner_pcp(n));
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    testkit::GenBudget b;
    b.seed = seed;
    procs.emplace_back("generated seed " + std::to_string(seed), testkit::gen_pcp_process(b));
  }
  for (auto& [name, p] : procs) {
    try {
      P::typecheck({}, p);
      auto m = typecheck_term({}, translate::translate_term({}, p));
      if (m.ty->kind != TypeKind::Unit) throw std::runtime_error("term has type " + to_string(m.ty));
      if (typecheck_config({}, translate::translate_config({}, p)).flag != Flag::Child)
        throw std::runtime_error("configuration is not a child");
    } catch (const std::exception& e) {
      v.fail(name + ": " + e.what());
      return v;
    }
  }
  v.detail = std::to_string(procs.size()) + " processes";
  return v;
}

Verdict correspondence() {
  Verdict v;
  int matched = 0, exceeded = 0, mismatched = 0;
  translate::SearchLimits lim;
  lim.depth = 20;
  for (auto name : corpus_pcp) {
    auto p = P::parse_process(corpus_file(name));
    for (auto& r : {translate::check_completeness({}, p, lim), translate::check_soundness({}, p, lim)}) {
      matched += r.count(translate::EdgeStatus::Matched);
      int x = r.count(translate::EdgeStatus::ExceededBound), m = r.count(translate::EdgeStatus::Mismatch);
      exceeded += x;
      mismatched += m;
      if (x) v.notes.push_back(std::string(name) + " " + r.direction + ": " + std::to_string(x) + " edges exceeded the bound");
      if (m) v.fail(std::string(name) + " " + r.direction + ": " + std::to_string(m) + " mismatches");
    }
  }
  if (v.ok)
    v.detail = std::to_string(matched) + " edges matched, " + std::to_string(exceeded) + " exceeded, " +
               std::to_string(mismatched) + " mismatched";
  return v;
}

Verdict m_to_c() {
  Verdict v;
  int reducing = 0, successors = 0;
  for (auto name : corpus_pcp) {
    try {
      auto r = translate::check_M_to_C({}, P::parse_process(corpus_file(name)));
      reducing += !r.equal;
      successors += r.successors;
    } catch (const translate::LemmaViolation& e) {
      v.fail(std::string(name) + ": " + e.what());
    }
  }
  if (v.ok)
    v.detail = std::to_string(reducing) + " reducing cases, " + std::to_string(successors) +
               " one-step successors rejoined";
  return v;
}

Verdict scheduler() {
  Verdict v;
  const int n = 3;
  auto pcp = translate::milner_pcp(n);
  auto hand = program(translate::milner_pgv_source(n));
  if (!congruent(translate::strip_unit_tails(translate::translate_config({}, pcp)),
                 translate::strip_unit_tails(hand)))
    v.fail("translated scheduler differs from the hand-written one");

  auto pr = P::run(pcp, 1000);
  if (pr.kind != P::PcpRun::Kind::Halt) v.fail("PCP scheduler does not halt");
  auto [out, tr] = run(hand, SchedulerPolicy::min_priority(), 1000);
  if (out.kind != RunOutcome::Kind::Value) v.fail("PGV scheduler does not terminate");

  std::vector<std::string> a, b;
  for (auto& s : pr.trace) a.push_back(s.rule);
  for (auto& s : tr.steps) b.push_back(s.label.rule);
  auto ma = comm_rules(a), mb = comm_rules(b);
  if (ma != mb) v.fail("communication rules differ between the two runs");
  if (v.ok) {
    std::ostringstream os;
    os << "n=3, PCP " << pr.trace.size() << " steps, PGV " << tr.steps.size() << " steps, shared";
    for (auto& [r, k] : ma) os << ' ' << r << " x" << k;
    v.detail = os.str();
  }
  return v;
}

Verdict duality() {
  Verdict v;
  int cases = 0, bad = 0;
  for (auto& a : pcp_types_to_depth(2, 4)) {
    if (P::check_well_formed(a)) continue;
    ++cases;
    if (!oracle_equal(translate::translate_type(P::dual(a)), oracle_dual(translate::translate_type(a)))) {
      if (!bad++) v.fail("discrepancy at " + P::to_string(a));
    }
  }
  if (v.ok) v.detail = std::to_string(cases) + " well-formed types, 0 discrepancies";
  else v.detail += " (" + std::to_string(bad) + " of " + std::to_string(cases) + ")";
  return v;
}

}  // namespace

int main() {
  report(1, "example discrimination", examples);
  report(2, "subject reduction on generated programs", subject_reduction);
  report(3, "progress on generated programs", progress);
  report(4, "echo server normal form", echo);
  report(5, "PCP progress on generated processes", pcp_progress);
  report(6, "translation preserves typing", preservation);
  report(7, "operational correspondence on the PCP corpus", correspondence);
  report(8, "term and configuration translations agree", m_to_c);
  report(9, "scheduler identity", scheduler);
  report(10, "translation commutes with duality", duality);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures ? 1 : 0;
}
