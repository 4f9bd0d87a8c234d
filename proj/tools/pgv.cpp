#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pgv/eval.hpp"
#include "pgv/parse.hpp"
#include "pgv/pcp.hpp"
#include "pgv/testkit.hpp"
#include "pgv/translate.hpp"
#include "pgv/typecheck.hpp"

using namespace pgv;
using nlohmann::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Opts {
  std::string file;
  std::string out;
  std::string report;
  std::string policy = "min-priority";
  int fuel = 10000;
  int depth = 20;
  int k = 4;
  std::uint64_t seed = kDefaultSeed;
  bool seed_given = false;
  bool json = false;
  bool explain = false;
  bool trace = false;
  bool term = false;
  bool pcp = false;
  testkit::GenBudget budget;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Usage("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const Opts& o, const json& j, const std::string& text) {
  if (o.json)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
}

json error_json(const TypeError& e) {
  json j{{"ok", false}, {"error", error_kind_name(e.kind)}, {"message", e.what()}};
  if (!e.constraint.empty()) {
    j["constraint"] = e.constraint;
    j["rule"] = e.rule;
    j["lhs"] = describe(e.lhs);
    j["rhs"] = describe(e.rhs);
  }
  if (e.span.line) j["line"] = e.span.line;
  return j;
}

int report_type_error(const Opts& o, const TypeError& e) {
  if (o.json)
    std::cout << error_json(e).dump(2) << "\n";
  else
    std::cout << error_kind_name(e.kind) << ": " << e.what() << "\n";
  return 1;
}

// ---------------------------------------------------------------- PGV

Program load_pgv(const std::string& path) {
  Program p = parse_program(slurp(path));
  if (auto t = std::get_if<TermP>(&p)) return elaborate(*t);
  return elaborate(std::get<ConfP>(p));
}

ConfP as_config(const Program& p) {
  if (auto t = std::get_if<TermP>(&p)) return cf::main(*t);
  return std::get<ConfP>(p);
}

int cmd_check(const Opts& o) {
  Program p = load_pgv(o.file);
  try {
    if (auto t = std::get_if<TermP>(&p)) {
      auto r = typecheck_term({}, *t, nullptr, o.explain);
      json j{{"ok", true}, {"type", to_string(r.ty)}, {"bound", to_string(r.bound)}};
      std::string text = "type: " + to_string(r.ty) + ", bound: " + to_string(r.bound) + "\n";
      if (o.explain) {
        j["derivation"] = to_string(*r.derivation);
        text += to_string(*r.derivation);
      }
      emit(o, j, text);
    } else {
      auto r = typecheck_config({}, std::get<ConfP>(p), o.explain);
      json j{{"ok", true}, {"flag", flag_name(r.flag)}};
      std::string text = std::string("config: ") + flag_name(r.flag) + "\n";
      if (o.explain) {
        j["derivation"] = to_string(*r.derivation);
        text += to_string(*r.derivation);
      }
      emit(o, j, text);
    }
  } catch (const TypeError& e) {
    return report_type_error(o, e);
  }
  return 0;
}

SchedulerPolicy policy_of(const Opts& o) {
  auto p = parse_policy(o.policy);
  if (!p) throw Usage("unknown policy " + o.policy + " (min-priority, random:SEED, exhaustive:DEPTH)");
  if (o.seed_given && p->kind == SchedulerPolicy::Kind::SeededRandom) p->seed = o.seed;
  return *p;
}

int cmd_run(const Opts& o, bool trace_only) {
  Program p = load_pgv(o.file);
  ConfP c = as_config(p);
  try {
    typecheck_config({}, c);
  } catch (const TypeError& e) {
    return report_type_error(o, e);
  }
  SchedulerPolicy pol = policy_of(o);
  try {
    auto [out, tr] = run(c, pol, o.fuel);
    if (trace_only) {
      std::cout << trace_to_json(tr) << "\n";
      return out.kind == RunOutcome::Kind::FuelExhausted ? 1 : 0;
    }
    json j{{"steps", tr.steps.size()}};
    std::string text;
    switch (out.kind) {
      case RunOutcome::Kind::Value:
        j["outcome"] = "value";
        j["value"] = to_string(out.value);
        text = "value: " + to_string(out.value) + "\n";
        break;
      case RunOutcome::Kind::NormalForm:
        j["outcome"] = "normal-form";
        j["config"] = to_string(out.config);
        text = "normal form: " + to_string(out.config) + "\n";
        break;
      case RunOutcome::Kind::FuelExhausted:
        j["outcome"] = "fuel-exhausted";
        j["config"] = to_string(out.config);
        text = "fuel exhausted after " + std::to_string(tr.steps.size()) + " steps\n";
        break;
    }
    if (o.trace && !o.json)
      for (auto& s : tr.steps) std::cerr << s.label.rule << "  " << to_string(s.config) << "\n";
    if (o.trace && o.json) j["trace"] = json::parse(trace_to_json(tr));
    emit(o, j, text);
    return out.kind == RunOutcome::Kind::FuelExhausted ? 1 : 0;
  } catch (const StuckNotNormal& e) {
    emit(o, json{{"outcome", "stuck"}, {"config", to_string(e.config)}},
         std::string("stuck: ") + to_string(e.config) + "\n");
    return 1;
  }
}

int cmd_canon(const Opts& o) {
  ConfP c = congruence_normalize(as_config(load_pgv(o.file)));
  emit(o, json{{"config", to_string(c)}, {"key", canonical_key(c)}}, to_string(c) + "\n");
  return 0;
}

int cmd_gen(const Opts& o) {
  testkit::GenBudget b = o.budget;
  b.seed = o.seed;
  std::string src = o.pcp ? testkit::gen_pcp_source(b) + "\n" : testkit::gen_pgv_source(b);
  emit(o, json{{"seed", b.seed}, {"source", src}}, src);
  return 0;
}

int cmd_annotate(const Opts& o) {
  auto r = testkit::find_annotations(slurp(o.file), o.k);
  json j{{"sat", r.sat}, {"tried", r.tried}, {"assignment", r.assignment}, {"witness", r.witness}};
  std::ostringstream text;
  if (r.sat) {
    text << "sat:";
    for (auto& [h, v] : r.assignment) text << " " << h << "=" << v;
  } else {
    text << "unsat for priorities up to " << o.k;
    if (!r.witness.empty()) text << ", witness {" << r.witness[0] << ", " << r.witness[1] << "}";
  }
  text << "\n";
  emit(o, j, text.str());
  return r.sat ? 0 : 1;
}

// ---------------------------------------------------------------- PCP

pcp::ProcP load_pcp(const std::string& path) { return pcp::parse_process(slurp(path)); }

int cmd_pcp_check(const Opts& o) {
  auto p = load_pcp(o.file);
  try {
    auto r = pcp::typecheck({}, p, o.explain);
    json j{{"ok", true}, {"process", pcp::to_string(p)}};
    std::string text = "ok: " + pcp::to_string(p) + "\n";
    if (o.explain) {
      j["derivation"] = to_string(*r.derivation);
      text += to_string(*r.derivation);
    }
    emit(o, j, text);
  } catch (const TypeError& e) {
    return report_type_error(o, e);
  }
  return 0;
}

int cmd_pcp_run(const Opts& o, bool trace_only) {
  auto p = load_pcp(o.file);
  try {
    pcp::typecheck({}, p);
  } catch (const TypeError& e) {
    return report_type_error(o, e);
  }
  auto r = pcp::run(p, o.fuel, o.seed_given ? o.seed : 0);
  if (trace_only) {
    std::cout << pcp::trace_to_json(p, r.trace) << "\n";
    return r.kind == pcp::PcpRun::Kind::Halt ? 0 : 1;
  }
  static const char* names[] = {"halt", "stuck", "fuel-exhausted"};
  const char* kind = names[static_cast<int>(r.kind)];
  json j{{"outcome", kind}, {"steps", r.trace.size()}, {"process", pcp::to_string(r.final)}};
  std::string text = std::string(kind) + " after " + std::to_string(r.trace.size()) + " steps";
  if (r.kind != pcp::PcpRun::Kind::Halt) text += ": " + pcp::to_string(r.final);
  emit(o, j, text + "\n");
  return r.kind == pcp::PcpRun::Kind::Halt ? 0 : 1;
}

int cmd_translate(const Opts& o) {
  auto p = pcp::expand_sugar(load_pcp(o.file));
  std::string conf = to_string(translate::translate_config({}, p));
  std::string text = conf + "\n";
  json j{{"config", conf}};
  if (o.term) {
    std::string term = to_string(translate::translate_term({}, p));
    j["term"] = term;
    text += "-- term\n-- " + term + "\n";
  }
  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) throw Usage("cannot write " + o.out);
    f << conf << "\n";
  }
  emit(o, j, text);
  return 0;
}

int cmd_correspond(const Opts& o) {
  auto p = load_pcp(o.file);
  translate::SearchLimits lim;
  lim.depth = o.depth;
  std::vector<translate::CorrespondenceReport> reps{translate::check_completeness({}, p, lim),
                                                    translate::check_soundness({}, p, lim)};
  if (!o.report.empty()) {
    std::ofstream f(o.report);
    if (!f) throw Usage("cannot write " + o.report);
    f << translate::report_to_json(reps) << "\n";
  }
  int bad = 0;
  std::ostringstream text;
  json j = json::array();
  for (auto& r : reps) {
    int m = r.count(translate::EdgeStatus::Matched), x = r.count(translate::EdgeStatus::ExceededBound),
        n = r.count(translate::EdgeStatus::Mismatch);
    bad += n;
    text << r.direction << ": " << m << " matched, " << x << " exceeded-bound, " << n << " mismatch\n";
    if (x) std::cerr << "warning: " << r.direction << " search hit the bound on " << x << " edges\n";
    j.push_back({{"direction", r.direction}, {"matched", m}, {"exceeded_bound", x}, {"mismatch", n}});
  }
  emit(o, j, text.str());
  return bad ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Priority GV and Priority CP toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Opts o;
  app.add_flag("--json", o.json, "structured output");

  auto file_arg = [&](CLI::App* c) { c->add_option("file", o.file, "input file")->required(); };
  auto policy_opts = [&](CLI::App* c) {
    c->add_option("--policy", o.policy, "min-priority, random:SEED or exhaustive:DEPTH");
    c->add_option("--fuel", o.fuel, "step limit");
    c->add_option("--seed", o.seed, "seed for random scheduling")->each([&](const std::string&) { o.seed_given = true; });
  };

  auto* check = app.add_subcommand("check", "type-check a .pgv file");
  file_arg(check);
  check->add_flag("--explain", o.explain, "print the derivation");
  auto* run = app.add_subcommand("run", "type-check and run a .pgv file");
  file_arg(run);
  policy_opts(run);
  run->add_flag("--trace", o.trace, "print every step");
  auto* trace = app.add_subcommand("trace", "print the reduction trace of a .pgv file as JSON");
  file_arg(trace);
  policy_opts(trace);
  auto* canon = app.add_subcommand("canon", "print the congruence-normal form");
  file_arg(canon);
  auto* gen = app.add_subcommand("gen", "emit a generated well-typed program");
  gen->add_option("--seed", o.seed, "generator seed");
  gen->add_option("--depth", o.budget.max_depth, "events per session");
  gen->add_option("--sessions", o.budget.max_sessions, "initial sessions");
  gen->add_flag("--pcp", o.pcp, "emit a PCP process instead");
  auto* annotate = app.add_subcommand("annotate", "search priority holes of a .pgv skeleton");
  file_arg(annotate);
  annotate->add_option("-k", o.k, "largest priority tried");
  auto* tr = app.add_subcommand("translate", "translate a .pcp process to a PGV configuration");
  file_arg(tr);
  tr->add_option("-o", o.out, "write the configuration here");
  tr->add_flag("--term", o.term, "also print the term translation");
  auto* cor = app.add_subcommand("correspond", "check operational correspondence for a .pcp process");
  file_arg(cor);
  cor->add_option("--depth", o.depth, "search depth");
  cor->add_option("--report", o.report, "write a JSON report");

  auto* pcp_cmd = app.add_subcommand("pcp", "Priority CP commands");
  pcp_cmd->require_subcommand(1);
  pcp_cmd->fallthrough();
  auto* pcheck = pcp_cmd->add_subcommand("check", "type-check a .pcp file");
  file_arg(pcheck);
  pcheck->add_flag("--explain", o.explain, "print the derivation");
  auto* prun = pcp_cmd->add_subcommand("run", "run a .pcp file");
  file_arg(prun);
  prun->add_option("--fuel", o.fuel, "step limit");
  prun->add_option("--seed", o.seed, "pick enabled steps at random")->each([&](const std::string&) { o.seed_given = true; });
  auto* ptrace = pcp_cmd->add_subcommand("trace", "print the reduction trace of a .pcp file as JSON");
  file_arg(ptrace);
  ptrace->add_option("--fuel", o.fuel, "step limit");
  ptrace->add_option("--seed", o.seed, "pick enabled steps at random")->each([&](const std::string&) { o.seed_given = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*check) return cmd_check(o);
    if (*run) return cmd_run(o, false);
    if (*trace) return cmd_run(o, true);
    if (*canon) return cmd_canon(o);
    if (*gen) return cmd_gen(o);
    if (*annotate) return cmd_annotate(o);
    if (*tr) return cmd_translate(o);
    if (*cor) return cmd_correspond(o);
    if (*pcheck) return cmd_pcp_check(o);
    if (*prun) return cmd_pcp_run(o, false);
    if (*ptrace) return cmd_pcp_run(o, true);
  } catch (const Usage& e) {
    std::cerr << "pgv: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << o.file << ":" << e.what() << "\n";
    return 1;
  } catch (const TypeError& e) {
    return report_type_error(o, e);
  } catch (const std::exception& e) {
    std::cerr << "pgv: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
