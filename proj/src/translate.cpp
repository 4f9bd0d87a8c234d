#include "pgv/translate.hpp"

#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "pgv/parse.hpp"
#include "pgv/typecheck.hpp"

namespace pgv::translate {

using pcp::PKind;
using pcp::ProcP;
using pcp::PTypeP;
using pcp::TKind;

TypeP translate_type(const PTypeP& a) {
  switch (a->kind) {
    case TKind::Tensor: return ty::send(a->o, dual(translate_type(a->a)), translate_type(a->b));
    case TKind::Parr: return ty::recv(a->o, translate_type(a->a), translate_type(a->b));
    case TKind::One: return ty::end_send(a->o);
    case TKind::Bot: return ty::end_recv(a->o);
    case TKind::Plus: return ty::select(a->o, translate_type(a->a), translate_type(a->b));
    case TKind::With: return ty::offer(a->o, translate_type(a->a), translate_type(a->b));
    case TKind::Nil: return ty::select_empty(a->o);
    case TKind::Top: return ty::offer_empty(a->o);
  }
  return nullptr;
}

TypeEnv translate_env(const pcp::PcpEnv& env) {
  TypeEnv out;
  for (auto& [x, t] : env.entries) out.add(x, translate_type(t));
  return out;
}

namespace {

struct Scope {
  std::map<Name, Name> ren;
  std::map<Name, PTypeP> types;

  Name at(const Name& x) const {
    auto it = ren.find(x);
    return it == ren.end() ? x : it->second;
  }
  PTypeP type(const Name& x) const {
    auto it = types.find(x);
    if (it == types.end()) throw std::invalid_argument("no session type known for " + x);
    return it->second;
  }
  Scope rebind(const Name& x, const Name& to, PTypeP t) const {
    Scope s = *this;
    s.ren[x] = to;
    s.types[x] = std::move(t);
    return s;
  }
};

Scope initial_scope(const pcp::PcpEnv& env) {
  Scope s;
  for (auto& [x, t] : env.entries) s.types[x] = t;
  return s;
}

TypeP res_annotation(const ProcP& p) {
  if (!p->ann) throw std::invalid_argument("restriction (nu " + p->x + " " + p->y + ") has no type");
  return translate_type(p->ann);
}

TermP var(const Scope& s, const Name& x) { return tm::var(s.at(x)); }

TermP let_in(const Name& x, const TermP& m, const TermP& body) { return tm::app(tm::lam(x, body), m); }

TermP term(const Scope& s, const ProcP& p);

// let x' = send (z, x) in ⟦P⟧M, with x' the continuation of x
TermP send_tail(const Scope& s, const ProcP& p, const Name& z) {
  PTypeP t = s.type(p->x);
  Name x2 = fresh_name(p->x);
  Scope k = s.rebind(p->x, x2, t->b).rebind(p->y, p->y, t->a);
  return let_in(x2, tm::app(Const::Send, tm::pair(tm::var(z), var(s, p->x))), term(k, p->p));
}

// let x' = close (send (inl y, x)); z in ⟦P⟧M
TermP select_tail(const Scope& s, const ProcP& p, const Name& y, const Name& z) {
  PTypeP t = s.type(p->x);
  bool left = p->kind == PKind::Inl;
  TypeP choice = translate_type(t);
  TypeP sum = choice->a;
  TermP inj = left ? tm::inl(tm::var(y), sum) : tm::inr(tm::var(y), sum);
  Name x2 = fresh_name(p->x);
  Scope k = s.rebind(p->x, x2, left ? t->a : t->b);
  return let_in(x2, tm::seq(tm::app(Const::Close, tm::app(Const::Send, tm::pair(inj, var(s, p->x)))), tm::var(z)),
                term(k, p->p));
}

TypeP select_fresh_type(const Scope& s, const ProcP& p) {
  TypeP choice = translate_type(s.type(p->x));
  return p->kind == PKind::Inl ? choice->a->a : choice->a->b;
}

TermP term(const Scope& s, const ProcP& p) {
  switch (p->kind) {
    case PKind::Halt: return tm::unit();
    case PKind::Link: return tm::app(Const::Link, tm::pair(var(s, p->x), var(s, p->y)));
    case PKind::Res: {
      Scope k = s.rebind(p->x, p->x, p->ann).rebind(p->y, p->y, p->ann ? pcp::dual(p->ann) : nullptr);
      return tm::let_pair(p->x, p->y, tm::app(tm::cnst(Const::New, res_annotation(p)), tm::unit()),
                          term(k, p->p));
    }
    case PKind::Par: {
      Name u = fresh_name("z");
      TermP child = tm::lam(u, tm::seq(tm::var(u), term(s, p->p)), ty::unit());
      return tm::seq(tm::app(Const::Spawn, child), term(s, p->q));
    }
    case PKind::Send: {
      PTypeP t = s.type(p->x);
      Name z = fresh_name("z");
      return tm::let_pair(p->y, z, tm::app(tm::cnst(Const::New, translate_type(t->a)), tm::unit()),
                          send_tail(s, p, z));
    }
    case PKind::Recv: {
      PTypeP t = s.type(p->x);
      Name x2 = fresh_name(p->x);
      Scope k = s.rebind(p->x, x2, t->b).rebind(p->y, p->y, t->a);
      return tm::let_pair(p->y, x2, tm::app(Const::Recv, var(s, p->x)), term(k, p->p));
    }
    case PKind::Close: return tm::seq(tm::app(Const::Close, var(s, p->x)), term(s, p->p));
    case PKind::Wait: return tm::seq(tm::app(Const::Wait, var(s, p->x)), term(s, p->p));
    case PKind::Inl:
    case PKind::Inr: {
      Name y = fresh_name("y"), z = fresh_name("z");
      return tm::let_pair(y, z, tm::app(tm::cnst(Const::New, select_fresh_type(s, p)), tm::unit()),
                          select_tail(s, p, y, z));
    }
    case PKind::Offer: {
      PTypeP t = s.type(p->x);
      Name l = fresh_name(p->x), r = fresh_name(p->x);
      return elaborate(tm::offer(var(s, p->x), l, term(s.rebind(p->x, l, t->a), p->p), r,
                                 term(s.rebind(p->x, r, t->b), p->q)));
    }
    case PKind::Absurd: return elaborate(tm::offer_empty(var(s, p->x), ty::unit()));
    case PKind::USend: return term(s, pcp::expand_sugar(p));
  }
  return nullptr;
}

ConfP config(const Scope& s, const ProcP& p) {
  switch (p->kind) {
    case PKind::Res: {
      Scope k = s.rebind(p->x, p->x, p->ann).rebind(p->y, p->y, p->ann ? pcp::dual(p->ann) : nullptr);
      return cf::res(p->x, p->y, config(k, p->p), res_annotation(p));
    }
    case PKind::Par: return cf::par(config(s, p->p), config(s, p->q));
    case PKind::Send: {
      PTypeP t = s.type(p->x);
      Name z = fresh_name("z");
      return cf::res(p->y, z, cf::child(send_tail(s, p, z)), translate_type(t->a));
    }
    case PKind::Inl:
    case PKind::Inr: {
      Name y = fresh_name("y"), z = fresh_name("z");
      return cf::res(y, z, cf::child(select_tail(s, p, y, z)), select_fresh_type(s, p));
    }
    case PKind::USend: return config(s, pcp::expand_sugar(p));
    default: return cf::child(term(s, p));
  }
}

// ---------------------------------------------------------------- search

struct Found {
  bool found = false;
  bool exceeded = false;
  std::vector<StepLabel> path;
};

template <class Pred>
Found search(const ConfP& start, int min_steps, const SearchLimits& lim, Pred&& goal) {
  struct Node {
    ConfP c;
    int depth;
    int parent;
    StepLabel label;
  };
  std::vector<Node> nodes{{start, 0, -1, {}}};
  std::unordered_set<std::string> seen{canonical_key(start)};
  Found out;
  auto path_to = [&](int i) {
    std::vector<StepLabel> p;
    for (; nodes[i].parent >= 0; i = nodes[i].parent) p.push_back(nodes[i].label);
    std::reverse(p.begin(), p.end());
    return p;
  };
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].depth >= min_steps && goal(nodes[i].c)) {
      out.found = true;
      out.path = path_to(static_cast<int>(i));
      return out;
    }
    if (nodes[i].depth >= lim.depth) {
      if (!enabled_steps(nodes[i].c).empty()) out.exceeded = true;
      continue;
    }
    for (auto& [label, next] : enabled_steps(nodes[i].c)) {
      if (!seen.insert(canonical_key(next)).second) continue;
      if (nodes.size() >= lim.max_states) {
        out.exceeded = true;
        return out;
      }
      nodes.push_back({next, nodes[i].depth + 1, static_cast<int>(i), label});
    }
  }
  return out;
}

}  // namespace

TermP translate_term(const pcp::PcpEnv& env, const ProcP& p) { return term(initial_scope(env), p); }

ConfP translate_config(const pcp::PcpEnv& env, const ProcP& p) { return config(initial_scope(env), p); }

MtoCVerdict check_M_to_C(const pcp::PcpEnv& env, const ProcP& p, int depth) {
  ConfP start = cf::child(translate_term(env, p));
  ConfP target = translate_config(env, p);
  MtoCVerdict v;
  if (congruent(start, target)) {
    v.equal = true;
    return v;
  }
  SearchLimits lim{depth, 20000};
  auto hit = [&](const ConfP& c) { return congruent(c, target); };
  Found f = search(start, 1, lim, hit);
  if (!f.found)
    throw LemmaViolation("child translation of " + pcp::to_string(p) + " never reaches its configuration translation");
  v.steps = static_cast<int>(f.path.size());
  for (auto& [label, next] : enabled_steps(start)) {
    if (!search(next, 0, lim, hit).found)
      throw LemmaViolation("after " + label.rule + " the configuration translation of " + pcp::to_string(p) +
                           " is no longer reachable");
    ++v.successors;
  }
  return v;
}

const char* edge_status_name(EdgeStatus s) {
  switch (s) {
    case EdgeStatus::Matched: return "matched";
    case EdgeStatus::ExceededBound: return "exceeded-bound";
    case EdgeStatus::Mismatch: return "mismatch";
  }
  return "?";
}

int CorrespondenceReport::count(EdgeStatus s) const {
  int n = 0;
  for (auto& e : edges) n += e.status == s;
  return n;
}

namespace {

// Every PCP process reachable from p in 1..depth steps, keyed up to congruence.
std::vector<ProcP> pcp_reachable(const ProcP& p, const SearchLimits& lim, bool& exceeded) {
  std::vector<std::pair<ProcP, int>> out;
  std::unordered_set<std::string> seen;
  std::deque<std::pair<ProcP, int>> todo{{p, 0}};
  while (!todo.empty()) {
    auto [q, d] = todo.front();
    todo.pop_front();
    if (d >= lim.depth) {
      if (!pcp::step(q).empty()) exceeded = true;
      continue;
    }
    for (auto& s : pcp::step(q)) {
      if (!seen.insert(pcp::canonical_key(s.result)).second) continue;
      if (out.size() >= lim.max_states) {
        exceeded = true;
        break;
      }
      out.emplace_back(s.result, d + 1);
      todo.emplace_back(s.result, d + 1);
    }
  }
  std::vector<ProcP> r;
  for (auto& [q, d] : out) r.push_back(q);
  return r;
}

}  // namespace

CorrespondenceReport check_completeness(const pcp::PcpEnv& env, const ProcP& p0, SearchLimits lim) {
  ProcP p = pcp::expand_sugar(p0);
  CorrespondenceReport rep{pcp::to_string(p0), "completeness", {}};
  ConfP start = translate_config(env, p);
  for (auto& s : pcp::step(p)) {
    EdgeReport e;
    e.edge = s.rule;
    e.target = pcp::to_string(s.result);
    ConfP target = translate_config(env, s.result);
    Found f = search(start, 1, lim, [&](const ConfP& c) { return congruent(c, target); });
    e.status = f.found ? EdgeStatus::Matched : f.exceeded ? EdgeStatus::ExceededBound : EdgeStatus::Mismatch;
    e.path = std::move(f.path);
    rep.edges.push_back(std::move(e));
  }
  return rep;
}

CorrespondenceReport check_soundness(const pcp::PcpEnv& env, const ProcP& p0, SearchLimits lim) {
  ProcP p = pcp::expand_sugar(p0);
  CorrespondenceReport rep{pcp::to_string(p0), "soundness", {}};
  bool pcp_exceeded = false;
  std::vector<ProcP> reach = pcp_reachable(p, lim, pcp_exceeded);
  std::vector<ConfP> targets;
  std::unordered_map<std::string, std::size_t> by_key;
  for (auto& q : reach) {
    targets.push_back(translate_config(env, q));
    by_key.emplace(canonical_key(targets.back()), targets.size() - 1);
  }
  std::size_t which = 0;
  auto hit = [&](const ConfP& c) {
    auto it = by_key.find(canonical_key(c));
    if (it != by_key.end() && congruent(c, targets[it->second])) {
      which = it->second;
      return true;
    }
    for (std::size_t i = 0; i < targets.size(); ++i)
      if (congruent(c, targets[i])) {
        which = i;
        return true;
      }
    return false;
  };
  for (auto& [label, next] : enabled_steps(translate_config(env, p))) {
    EdgeReport e;
    e.edge = label.rule;
    Found f = search(next, 0, lim, hit);
    e.status = f.found                           ? EdgeStatus::Matched
               : f.exceeded || pcp_exceeded      ? EdgeStatus::ExceededBound
                                                 : EdgeStatus::Mismatch;
    if (f.found) e.target = pcp::to_string(reach[which]);
    e.path.push_back(label);
    for (auto& l : f.path) e.path.push_back(l);
    rep.edges.push_back(std::move(e));
  }
  return rep;
}

std::string report_to_json(const std::vector<CorrespondenceReport>& reports, int indent) {
  nlohmann::json out = nlohmann::json::array();
  for (auto& r : reports) {
    nlohmann::json j{{"source", r.source}, {"direction", r.direction}, {"edges", nlohmann::json::array()}};
    for (auto& e : r.edges) {
      nlohmann::json path = nlohmann::json::array();
      for (auto& l : e.path) path.push_back({{"rule", l.rule}, {"thread", l.thread}, {"names", l.names}});
      j["edges"].push_back(
          {{"edge", e.edge}, {"target", e.target}, {"status", edge_status_name(e.status)}, {"path", path}});
    }
    out.push_back(j);
  }
  return out.dump(indent);
}

// ---------------------------------------------------------------- scheduler

namespace {
std::string nm(char c, int i, bool peer) { return std::string(1, c) + std::to_string(i) + (peer ? "'" : ""); }
}  // namespace

std::string milner_pcp_source(int n) {
  std::ostringstream os;
  for (int i = 1; i <= n; ++i) {
    int a = 3 * (i - 1);
    os << "(nu " << nm('a', i, false) << " " << nm('a', i, true) << " : one^" << a << ") ";
    os << "(nu " << nm('b', i, false) << " " << nm('b', i, true) << " : bot^" << a + 1 << ") ";
    os << "(nu " << nm('c', i, false) << " " << nm('c', i, true) << " : one^" << a + 2 << ")\n";
  }
  os << "(nu d d' : one^" << 3 * n << ")\n(";
  for (int i = 1; i <= n; ++i) {
    if (i > 1) os << "\n || ";
    os << nm('a', i, true) << "()." << nm('b', i, true) << "[]." << (i == 1 ? "d'()." : "") << "halt\n || ";
    if (i > 1) os << nm('c', i - 1, true) << "().";
    os << nm('a', i, false) << "[]." << nm('b', i, false) << "()." << nm('c', i, false) << "[].";
    if (i == 1) os << nm('c', n, true) << "().d[].";
    os << "halt";
  }
  os << ")\n";
  return os.str();
}

ProcP milner_pcp(int n) { return pcp::parse_process(milner_pcp_source(n)); }

std::string milner_pgv_source(int n) {
  std::ostringstream os;
  for (int i = 1; i <= n; ++i) {
    int a = 3 * (i - 1);
    os << "(nu " << nm('a', i, false) << " " << nm('a', i, true) << " : end! " << a << ")\n";
    os << "(nu " << nm('b', i, false) << " " << nm('b', i, true) << " : end? " << a + 1 << ")\n";
    os << "(nu " << nm('c', i, false) << " " << nm('c', i, true) << " : end! " << a + 2 << ")\n";
  }
  os << "(nu d d' : end! " << 3 * n << ")\n(";
  for (int i = 1; i <= n; ++i) {
    if (i > 1) os << "\n || ";
    os << (i == 1 ? "main " : "child ") << "wait " << nm('a', i, true) << "; close " << nm('b', i, true)
       << (i == 1 ? "; wait d'" : "") << "\n || child ";
    if (i > 1) os << "wait " << nm('c', i - 1, true) << "; ";
    os << "close " << nm('a', i, false) << "; wait " << nm('b', i, false) << "; close " << nm('c', i, false);
    if (i == 1) os << "; wait " << nm('c', n, true) << "; close d";
  }
  os << ")\n";
  return os.str();
}

namespace {
TermP strip_tail(const TermP& t) {
  if (t->kind != TermKind::Seq) return t;
  if (t->kids[1]->kind == TermKind::Unit) return strip_tail(t->kids[0]);
  return tm::with_kids(t, {t->kids[0], strip_tail(t->kids[1])});
}
}  // namespace

ConfP strip_unit_tails(const ConfP& c) {
  switch (c->kind) {
    case ConfKind::Thread: return cf::child(strip_tail(c->term), c->id);
    case ConfKind::Par: return cf::par(strip_unit_tails(c->c), strip_unit_tails(c->d));
    case ConfKind::Res: return cf::res(c->x, c->y, strip_unit_tails(c->c), c->ann);
  }
  return c;
}

}  // namespace pgv::translate
