#include "pgv/pcp.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lexer.hpp"
#include "pgv/parse.hpp"

namespace pgv::pcp {

// ---------------------------------------------------------------- types

namespace pty {
PTypeP make(TKind k, Priority o, PTypeP a, PTypeP b) {
  auto t = std::make_shared<PType>();
  t->kind = k;
  t->o = std::move(o);
  t->a = std::move(a);
  t->b = std::move(b);
  return t;
}
PTypeP tensor(Priority o, PTypeP a, PTypeP b) { return make(TKind::Tensor, o, a, b); }
PTypeP parr(Priority o, PTypeP a, PTypeP b) { return make(TKind::Parr, o, a, b); }
PTypeP one(Priority o) { return make(TKind::One, o); }
PTypeP bot(Priority o) { return make(TKind::Bot, o); }
PTypeP plus(Priority o, PTypeP a, PTypeP b) { return make(TKind::Plus, o, a, b); }
PTypeP with(Priority o, PTypeP a, PTypeP b) { return make(TKind::With, o, a, b); }
PTypeP nil(Priority o) { return make(TKind::Nil, o); }
PTypeP top(Priority o) { return make(TKind::Top, o); }
}  // namespace pty

bool is_binary(TKind k) {
  return k == TKind::Tensor || k == TKind::Parr || k == TKind::Plus || k == TKind::With;
}

bool type_equal(const PTypeP& a, const PTypeP& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind || !(a->o == b->o)) return false;
  if (!is_binary(a->kind)) return true;
  return type_equal(a->a, b->a) && type_equal(a->b, b->b);
}

namespace {
TKind dual_kind(TKind k) {
  switch (k) {
    case TKind::Tensor: return TKind::Parr;
    case TKind::Parr: return TKind::Tensor;
    case TKind::One: return TKind::Bot;
    case TKind::Bot: return TKind::One;
    case TKind::Plus: return TKind::With;
    case TKind::With: return TKind::Plus;
    case TKind::Nil: return TKind::Top;
    case TKind::Top: return TKind::Nil;
  }
  return k;
}
}  // namespace

PTypeP dual(const PTypeP& a) {
  if (!is_binary(a->kind)) return pty::make(dual_kind(a->kind), a->o);
  return pty::make(dual_kind(a->kind), a->o, dual(a->a), dual(a->b));
}

Priority pr(const PTypeP& a) { return a->o; }

std::optional<std::string> check_well_formed(const PTypeP& a) {
  if (!is_binary(a->kind)) return std::nullopt;
  if (auto e = check_well_formed(a->a)) return e;
  if (auto e = check_well_formed(a->b)) return e;
  if (!(a->o < a->a->o) || !(a->o < a->b->o))
    return "top-most connective of " + to_string(a) + " does not hold the smallest priority";
  return std::nullopt;
}

namespace {
const char* op_of(TKind k) {
  switch (k) {
    case TKind::Tensor: return "*";
    case TKind::Parr: return "|";
    case TKind::Plus: return "+";
    case TKind::With: return "&";
    case TKind::One: return "one";
    case TKind::Bot: return "bot";
    case TKind::Nil: return "zero";
    case TKind::Top: return "top";
  }
  return "?";
}

void print_type(std::ostream& os, const PTypeP& a, bool nested) {
  if (!is_binary(a->kind)) {
    os << op_of(a->kind) << "^" << to_string(a->o);
    return;
  }
  if (nested) os << "(";
  print_type(os, a->a, true);
  os << " " << op_of(a->kind) << "^" << to_string(a->o) << " ";
  print_type(os, a->b, false);
  if (nested) os << ")";
}
}  // namespace

std::string to_string(const PTypeP& a) {
  std::ostringstream os;
  print_type(os, a, false);
  return os.str();
}

PTypeP PcpEnv::lookup(const Name& n) const {
  for (auto& [k, v] : entries)
    if (k == n) return v;
  return nullptr;
}

void PcpEnv::add(const Name& n, PTypeP t) {
  if (lookup(n)) throw std::invalid_argument("duplicate name " + n);
  entries.emplace_back(n, std::move(t));
}

PriorityBound minpr(const PcpEnv& env) {
  PriorityBound b = PriorityBound::top();
  for (auto& [n, t] : env.entries) b = meet(b, PriorityBound::fin(t->o));
  return b;
}

std::string to_string(const PcpEnv& env) {
  std::string s = "{";
  for (std::size_t i = 0; i < env.entries.size(); ++i)
    s += (i ? ", " : "") + env.entries[i].first + " : " + to_string(env.entries[i].second);
  return s + "}";
}

// ---------------------------------------------------------------- processes

namespace pp {
namespace {
std::shared_ptr<Proc> mk(PKind k, Name x = {}, Name y = {}) {
  auto p = std::make_shared<Proc>();
  p->kind = k;
  p->x = std::move(x);
  p->y = std::move(y);
  return p;
}
}  // namespace
ProcP link(Name x, Name y) { return mk(PKind::Link, x, y); }
ProcP res(Name x, Name y, ProcP p, PTypeP ann) {
  auto r = mk(PKind::Res, x, y);
  r->p = std::move(p);
  r->ann = std::move(ann);
  return r;
}
ProcP par(ProcP p, ProcP q) {
  auto r = mk(PKind::Par);
  r->p = std::move(p);
  r->q = std::move(q);
  return r;
}
ProcP halt() { return mk(PKind::Halt); }
#define PCP_PREFIX(fn, kind)        \
  ProcP fn(Name x, Name y, ProcP p) { \
    auto r = mk(kind, x, y);        \
    r->p = std::move(p);            \
    return r;                       \
  }
PCP_PREFIX(send, PKind::Send)
PCP_PREFIX(usend, PKind::USend)
PCP_PREFIX(recv, PKind::Recv)
#undef PCP_PREFIX
ProcP close(Name x, ProcP p) {
  auto r = mk(PKind::Close, x);
  r->p = std::move(p);
  return r;
}
ProcP wait(Name x, ProcP p) {
  auto r = mk(PKind::Wait, x);
  r->p = std::move(p);
  return r;
}
ProcP inl(Name x, ProcP p) {
  auto r = mk(PKind::Inl, x);
  r->p = std::move(p);
  return r;
}
ProcP inr(Name x, ProcP p) {
  auto r = mk(PKind::Inr, x);
  r->p = std::move(p);
  return r;
}
ProcP offer(Name x, ProcP p, ProcP q) {
  auto r = mk(PKind::Offer, x);
  r->p = std::move(p);
  r->q = std::move(q);
  return r;
}
ProcP absurd(Name x) { return mk(PKind::Absurd, x); }
}  // namespace pp

// ---------------------------------------------------------------- parsing

namespace {

using detail::Cursor;
using detail::Tok;

class PParser {
 public:
  explicit PParser(const std::string& text) : c_(detail::lex(text)) {}

  void finish() {
    if (!c_.at_end()) c_.fail("unexpected '" + c_.peek().text + "'");
  }

  Priority priority() {
    c_.expect("^");
    auto t = c_.peek();
    if (t.kind != Tok::Number) c_.fail("expected a priority but found '" + t.text + "'");
    c_.next();
    return Priority(std::stoi(t.text));
  }

  PTypeP type() {
    PTypeP a = atom_type();
    static const std::map<std::string, TKind> ops = {
        {"*", TKind::Tensor}, {"|", TKind::Parr}, {"+", TKind::Plus}, {"&", TKind::With}};
    for (auto& [s, k] : ops)
      if (c_.accept(s)) {
        Priority o = priority();
        return pty::make(k, o, a, type());
      }
    return a;
  }

  PTypeP atom_type() {
    if (c_.accept("(")) {
      PTypeP t = type();
      c_.expect(")");
      return t;
    }
    static const std::map<std::string, TKind> units = {
        {"one", TKind::One}, {"bot", TKind::Bot}, {"zero", TKind::Nil}, {"top", TKind::Top}};
    for (auto& [s, k] : units)
      if (c_.accept(s)) return pty::make(k, priority());
    c_.fail("expected a type but found '" + c_.peek().text + "'");
  }

  ProcP process() {
    ProcP p = prefix();
    while (c_.accept("||")) p = pp::par(p, prefix());
    return p;
  }

  Name ident() {
    auto t = c_.peek();
    if (t.kind != Tok::Ident || detail::is_keyword(t.text)) c_.fail("expected a name but found '" + t.text + "'");
    c_.next();
    return t.text;
  }

  Name use(const Name& n) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == n) return it->second;
    return n;
  }

  Name bind(const Name& n) {
    Name f = fresh_name(n);
    scope_.emplace_back(n, f);
    return f;
  }

  ProcP under(const std::vector<Name>& names, std::vector<Name>& fresh) {
    std::size_t mark = scope_.size();
    for (auto& n : names) fresh.push_back(bind(n));
    ProcP body = prefix();
    scope_.resize(mark);
    return body;
  }

  ProcP prefix() {
    if (c_.accept("halt")) return pp::halt();
    if (c_.at("(") && c_.at("nu", 1)) {
      c_.next();
      c_.next();
      Name x = ident(), y = ident();
      if (x == y) c_.fail("restriction binds " + x + " twice");
      PTypeP ann;
      if (c_.accept(":")) ann = type();
      c_.expect(")");
      std::vector<Name> f;
      ProcP body = under({x, y}, f);
      return pp::res(f[0], f[1], body, ann);
    }
    if (c_.accept("(")) {
      std::size_t mark = scope_.size();
      ProcP p = process();
      scope_.resize(mark);
      c_.expect(")");
      return p;
    }
    Name x = use(ident());
    if (c_.accept("<->")) return pp::link(x, use(ident()));
    if (c_.accept("case")) {
      c_.expect("{");
      if (c_.accept("}")) return pp::absurd(x);
      std::size_t mark = scope_.size();
      ProcP l = process();
      scope_.resize(mark);
      c_.expect(";");
      ProcP r = process();
      scope_.resize(mark);
      c_.expect("}");
      return pp::offer(x, l, r);
    }
    if (c_.accept("<")) {
      Name y = use(ident());
      c_.expect(">");
      c_.expect(".");
      return pp::usend(x, y, prefix());
    }
    if (c_.accept("[")) {
      if (c_.accept("]")) {
        c_.expect(".");
        return pp::close(x, prefix());
      }
      if (c_.at("inl") || c_.at("inr")) {
        bool left = c_.at("inl");
        c_.next();
        c_.expect("]");
        c_.expect(".");
        ProcP k = prefix();
        return left ? pp::inl(x, k) : pp::inr(x, k);
      }
      Name y = ident();
      c_.expect("]");
      c_.expect(".");
      std::vector<Name> f;
      ProcP k = under({y}, f);
      return pp::send(x, f[0], k);
    }
    if (c_.accept("(")) {
      if (c_.accept(")")) {
        c_.expect(".");
        return pp::wait(x, prefix());
      }
      Name y = ident();
      c_.expect(")");
      c_.expect(".");
      std::vector<Name> f;
      ProcP k = under({y}, f);
      return pp::recv(x, f[0], k);
    }
    c_.fail("expected a process action after " + x);
  }

 private:
  Cursor c_;
  std::vector<std::pair<Name, Name>> scope_;
};

}  // namespace

PTypeP parse_type(const std::string& text) {
  PParser p(text);
  PTypeP t = p.type();
  p.finish();
  return t;
}

ProcP parse_process(const std::string& text) {
  PParser p(text);
  ProcP t = p.process();
  p.finish();
  return t;
}

namespace {
void print_proc(std::ostream& os, const ProcP& p, bool prefix_pos) {
  switch (p->kind) {
    case PKind::Link: os << p->x << " <-> " << p->y; return;
    case PKind::Halt: os << "halt"; return;
    case PKind::Res:
      os << "(nu " << p->x << " " << p->y;
      if (p->ann) os << " : " << to_string(p->ann);
      os << ") ";
      print_proc(os, p->p, true);
      return;
    case PKind::Par:
      if (prefix_pos) os << "(";
      print_proc(os, p->p, false);
      os << " || ";
      print_proc(os, p->q, true);
      if (prefix_pos) os << ")";
      return;
    case PKind::Send: os << p->x << "[" << p->y << "]."; break;
    case PKind::USend: os << p->x << "<" << p->y << ">."; break;
    case PKind::Recv: os << p->x << "(" << p->y << ")."; break;
    case PKind::Close: os << p->x << "[]."; break;
    case PKind::Wait: os << p->x << "()."; break;
    case PKind::Inl: os << p->x << "[inl]."; break;
    case PKind::Inr: os << p->x << "[inr]."; break;
    case PKind::Offer:
      os << p->x << " case {";
      print_proc(os, p->p, false);
      os << "; ";
      print_proc(os, p->q, false);
      os << "}";
      return;
    case PKind::Absurd: os << p->x << " case {}"; return;
  }
  print_proc(os, p->p, true);
}
}  // namespace

std::string to_string(const ProcP& p) {
  std::ostringstream os;
  print_proc(os, p, false);
  return os.str();
}

namespace {
ProcP with_kids(const ProcP& p, ProcP a, ProcP b) {
  if (a == p->p && b == p->q) return p;
  auto r = std::make_shared<Proc>(*p);
  r->p = std::move(a);
  r->q = std::move(b);
  return r;
}
}  // namespace

ProcP expand_sugar(const ProcP& p) {
  ProcP a = p->p ? expand_sugar(p->p) : nullptr;
  ProcP b = p->q ? expand_sugar(p->q) : nullptr;
  if (p->kind == PKind::USend) {
    Name z = fresh_name("z");
    return pp::send(p->x, z, pp::par(pp::link(z, p->y), a));
  }
  return with_kids(p, a, b);
}

NameSet free_names(const ProcP& p) {
  NameSet s;
  switch (p->kind) {
    case PKind::Halt: return s;
    case PKind::Link: return {p->x, p->y};
    case PKind::Res:
      s = free_names(p->p);
      s.erase(p->x);
      s.erase(p->y);
      return s;
    case PKind::Par:
    case PKind::Offer: {
      s = free_names(p->p);
      auto t = free_names(p->q);
      s.insert(t.begin(), t.end());
      if (p->kind == PKind::Offer) s.insert(p->x);
      return s;
    }
    case PKind::Send:
    case PKind::Recv:
      s = free_names(p->p);
      s.erase(p->y);
      s.insert(p->x);
      return s;
    case PKind::USend:
      s = free_names(p->p);
      s.insert(p->x);
      s.insert(p->y);
      return s;
    case PKind::Absurd: return {p->x};
    default:
      s = free_names(p->p);
      s.insert(p->x);
      return s;
  }
}

ProcP rename_free(const ProcP& p, const Name& from, const Name& to) {
  auto ren = [&](const Name& n) { return n == from ? to : n; };
  switch (p->kind) {
    case PKind::Halt: return p;
    case PKind::Res:
      if (p->x == from || p->y == from) return p;
      return pp::res(p->x, p->y, rename_free(p->p, from, to), p->ann);
    case PKind::Send:
    case PKind::Recv: {
      auto r = std::make_shared<Proc>(*p);
      r->x = ren(p->x);
      if (p->y != from) r->p = rename_free(p->p, from, to);
      return r;
    }
    default: {
      auto r = std::make_shared<Proc>(*p);
      r->x = ren(p->x);
      if (p->kind == PKind::Link || p->kind == PKind::USend) r->y = ren(p->y);
      if (p->p) r->p = rename_free(p->p, from, to);
      if (p->q) r->q = rename_free(p->q, from, to);
      return r;
    }
  }
}

// ---------------------------------------------------------------- typing

namespace {

class PChecker {
 public:
  explicit PChecker(bool deriv) : deriv_(deriv) {}

  std::map<Name, PTypeP> avail;
  std::set<Name> used;

  struct Res {
    PcpEnv env;  // what the process consumed
    bool slack = false;
    DerivationP d;
  };

  void add(const Name& x, const PTypeP& t) {
    if (avail.count(x))
      throw TypeError(ErrorKind::EnvOverlap, "name " + x + " is bound twice");
    used.erase(x);
    avail[x] = t;
  }

  PTypeP take(const Name& x, const char* rule) {
    auto it = avail.find(x);
    if (it == avail.end()) {
      if (used.count(x)) throw TypeError(ErrorKind::NonLinearUse, std::string(rule) + ": " + x + " is used twice");
      throw TypeError(ErrorKind::UnboundName, std::string(rule) + ": unbound name " + x);
    }
    PTypeP t = it->second;
    avail.erase(it);
    used.insert(x);
    return t;
  }

  void ingress(const PTypeP& t) {
    if (auto e = check_well_formed(t)) throw TypeError(ErrorKind::IllFormedType, *e);
  }

  DerivationP node(const char* rule, const ProcP& p) {
    if (!deriv_) return nullptr;
    auto d = std::make_shared<Derivation>();
    d->rule = rule;
    d->judgement = to_string(p);
    return d;
  }

  void less(const DerivationP& d, const char* rule, const std::string& c, PriorityBound l, PriorityBound r) {
    bool ok = l < r;
    if (d) d->checks.push_back({c, l, r, ok});
    if (!ok) {
      TypeError e(ErrorKind::PriorityViolation, std::string(rule) + ": side condition " + c + " fails (" +
                                                    describe(l) + " is not below " + describe(r) + ")");
      e.constraint = c;
      e.lhs = l;
      e.rhs = r;
      e.rule = rule;
      throw e;
    }
  }

  void kind_is(const PTypeP& t, TKind k, const Name& x, const char* rule) {
    if (t->kind != k)
      throw TypeError(ErrorKind::TypeMismatch,
                      std::string(rule) + ": " + x + " has type " + to_string(t) + ", expected a " + op_of(k));
  }

  // Removes the entries for `names` from the consumed env, demanding each
  // was consumed unless the subprocess is slack.
  PcpEnv drop(Res& r, const std::vector<Name>& names, const char* rule) {
    PcpEnv rest;
    for (auto& e : r.env.entries)
      if (std::find(names.begin(), names.end(), e.first) == names.end()) rest.entries.push_back(e);
    for (auto& n : names) {
      if (r.env.lookup(n)) continue;
      if (!r.slack || !avail.count(n))
        throw TypeError(ErrorKind::NonLinearUse, std::string(rule) + ": " + n + " is never used");
      avail.erase(n);
      used.insert(n);
    }
    return rest;
  }

  Res check(const ProcP& p) {
    Res r;
    switch (p->kind) {
      case PKind::Halt: r.d = node("T-Halt", p); return r;
      case PKind::Link: {
        PTypeP a = take(p->x, "T-Link");
        PTypeP b = take(p->y, "T-Link");
        if (!type_equal(b, dual(a)))
          throw TypeError(ErrorKind::DualityMismatch, "T-Link: " + to_string(a) + " and " + to_string(b) + " are not dual");
        r.env.entries = {{p->x, a}, {p->y, b}};
        r.d = node("T-Link", p);
        return r;
      }
      case PKind::Res: {
        if (!p->ann) throw TypeError(ErrorKind::MissingAnnotation, "restriction (nu " + p->x + " " + p->y + ") needs a type");
        ingress(p->ann);
        add(p->x, p->ann);
        add(p->y, dual(p->ann));
        Res k = check(p->p);
        r.env = drop(k, {p->x, p->y}, "T-Res");
        r.slack = k.slack;
        r.d = node("T-Res", p);
        if (r.d && k.d) r.d->kids.push_back(k.d);
        return r;
      }
      case PKind::Par: {
        Res a = check(p->p);
        Res b = check(p->q);
        r.env = a.env;
        for (auto& e : b.env.entries) r.env.entries.push_back(e);
        r.slack = a.slack || b.slack;
        r.d = node("T-Par", p);
        if (r.d) {
          if (a.d) r.d->kids.push_back(a.d);
          if (b.d) r.d->kids.push_back(b.d);
        }
        return r;
      }
      case PKind::Send:
      case PKind::Recv: {
        bool send = p->kind == PKind::Send;
        const char* rule = send ? "T-Send" : "T-Recv";
        PTypeP t = take(p->x, rule);
        kind_is(t, send ? TKind::Tensor : TKind::Parr, p->x, rule);
        add(p->y, t->a);
        add(p->x, t->b);
        Res k = check(p->p);
        PcpEnv gamma = drop(k, {p->x, p->y}, rule);
        r.d = node(rule, p);
        less(r.d, rule, "o < minpr(Gamma, A, B)", PriorityBound::fin(t->o),
             meet(minpr(gamma), meet(PriorityBound::fin(t->a->o), PriorityBound::fin(t->b->o))));
        r.env = gamma;
        r.env.entries.emplace_back(p->x, t);
        r.slack = k.slack;
        if (r.d && k.d) r.d->kids.push_back(k.d);
        return r;
      }
      case PKind::Close:
      case PKind::Wait: {
        bool close = p->kind == PKind::Close;
        const char* rule = close ? "T-Close" : "T-Wait";
        PTypeP t = take(p->x, rule);
        kind_is(t, close ? TKind::One : TKind::Bot, p->x, rule);
        Res k = check(p->p);
        r.d = node(rule, p);
        less(r.d, rule, "o < minpr(Gamma)", PriorityBound::fin(t->o), minpr(k.env));
        r.env = k.env;
        r.env.entries.emplace_back(p->x, t);
        r.slack = k.slack;
        if (r.d && k.d) r.d->kids.push_back(k.d);
        return r;
      }
      case PKind::Inl:
      case PKind::Inr: {
        bool left = p->kind == PKind::Inl;
        const char* rule = left ? "T-Select-Inl" : "T-Select-Inr";
        PTypeP t = take(p->x, rule);
        kind_is(t, TKind::Plus, p->x, rule);
        add(p->x, left ? t->a : t->b);
        Res k = check(p->p);
        PcpEnv gamma = drop(k, {p->x}, rule);
        r.d = node(rule, p);
        less(r.d, rule, "o < minpr(Gamma, A, B)", PriorityBound::fin(t->o),
             meet(minpr(gamma), meet(PriorityBound::fin(t->a->o), PriorityBound::fin(t->b->o))));
        PriorityBound pa = PriorityBound::fin(t->a->o), pb = PriorityBound::fin(t->b->o);
        bool eq = pa == pb;
        if (r.d) r.d->checks.push_back({"pr(A) = pr(B)", pa, pb, eq});
        if (!eq) {
          TypeError e(ErrorKind::PriorityViolation, std::string(rule) + ": side condition pr(A) = pr(B) fails (" +
                                                        describe(pa) + " vs " + describe(pb) + ")");
          e.constraint = "pr(A) = pr(B)";
          e.lhs = pa;
          e.rhs = pb;
          e.rule = rule;
          throw e;
        }
        r.env = gamma;
        r.env.entries.emplace_back(p->x, t);
        r.slack = k.slack;
        if (r.d && k.d) r.d->kids.push_back(k.d);
        return r;
      }
      case PKind::Offer: {
        PTypeP t = take(p->x, "T-Offer");
        kind_is(t, TKind::With, p->x, "T-Offer");
        auto saved_avail = avail;
        auto saved_used = used;
        add(p->x, t->a);
        Res a = check(p->p);
        PcpEnv ga = drop(a, {p->x}, "T-Offer");
        auto avail_a = avail;
        auto used_a = used;
        avail = saved_avail;
        used = saved_used;
        add(p->x, t->b);
        Res b = check(p->q);
        PcpEnv gb = drop(b, {p->x}, "T-Offer");
        auto names = [](const PcpEnv& e) {
          std::set<Name> s;
          for (auto& x : e.entries) s.insert(x.first);
          return s;
        };
        auto sa = names(ga), sb = names(gb);
        bool ab = std::includes(sb.begin(), sb.end(), sa.begin(), sa.end());
        bool ba = std::includes(sa.begin(), sa.end(), sb.begin(), sb.end());
        if (!(sa == sb || (a.slack && ab) || (b.slack && ba)))
          throw TypeError(ErrorKind::NonLinearUse, "T-Offer: branches use different names");
        PcpEnv gamma = sa.size() >= sb.size() ? ga : gb;
        if (sa.size() > sb.size()) {
          avail = avail_a;
          used = used_a;
        }
        for (auto& e : gamma.entries) {
          avail.erase(e.first);
          used.insert(e.first);
        }
        r.d = node("T-Offer", p);
        less(r.d, "T-Offer", "o < minpr(Gamma, A, B)", PriorityBound::fin(t->o),
             meet(minpr(gamma), meet(PriorityBound::fin(t->a->o), PriorityBound::fin(t->b->o))));
        r.env = gamma;
        r.env.entries.emplace_back(p->x, t);
        r.slack = a.slack && b.slack;
        if (r.d) {
          if (a.d) r.d->kids.push_back(a.d);
          if (b.d) r.d->kids.push_back(b.d);
        }
        return r;
      }
      case PKind::Absurd: {
        PTypeP t = take(p->x, "T-Offer-Absurd");
        kind_is(t, TKind::Top, p->x, "T-Offer-Absurd");
        r.env.entries.emplace_back(p->x, t);
        r.slack = true;
        r.d = node("T-Offer-Absurd", p);
        return r;
      }
      case PKind::USend: {
        // T-UnboundSend, checked through its expansion
        return check(expand_sugar(p));
      }
    }
    return r;
  }

 private:
  bool deriv_;
};

}  // namespace

PcpTyping typecheck(const PcpEnv& env, const ProcP& p, bool want_derivation) {
  PChecker ck(want_derivation);
  for (auto& [x, t] : env.entries) {
    ck.ingress(t);
    ck.add(x, t);
  }
  auto r = ck.check(p);
  if (!ck.avail.empty() && !r.slack)
    throw TypeError(ErrorKind::NonLinearUse, "name " + ck.avail.begin()->first + " is never used");
  return {env, r.d};
}

// ---------------------------------------------------------------- soups

namespace {

struct PRes {
  Name x, y;
  PTypeP ann;
};

struct PSoup {
  std::vector<PRes> res;
  std::vector<ProcP> procs;
};

void flatten(const ProcP& p, PSoup& s) {
  switch (p->kind) {
    case PKind::Halt: return;
    case PKind::Par:
      flatten(p->p, s);
      flatten(p->q, s);
      return;
    case PKind::Res:
      s.res.push_back({p->x, p->y, p->ann});
      flatten(p->p, s);
      return;
    default: s.procs.push_back(p);
  }
}

void tidy(PSoup& s) {
  for (std::size_t i = 0; i < s.res.size();) {
    auto it = std::find_if(s.procs.begin(), s.procs.end(), [&](const ProcP& q) {
      return q->kind == PKind::Link &&
             ((q->x == s.res[i].x && q->y == s.res[i].y) || (q->x == s.res[i].y && q->y == s.res[i].x));
    });
    if (it != s.procs.end()) {
      s.procs.erase(it);
      s.res.erase(s.res.begin() + static_cast<long>(i));
    } else {
      ++i;
    }
  }
}

PSoup to_soup(const ProcP& p) {
  PSoup s;
  flatten(p, s);
  tidy(s);
  return s;
}

ProcP from_soup(const PSoup& s) {
  ProcP body;
  for (auto it = s.procs.rbegin(); it != s.procs.rend(); ++it) body = body ? pp::par(*it, body) : *it;
  if (!body) return pp::halt();
  for (auto it = s.res.rbegin(); it != s.res.rend(); ++it) body = pp::res(it->x, it->y, body, it->ann);
  return body;
}

const PRes* find_res(const PSoup& s, const Name& n, Name* peer) {
  for (auto& r : s.res)
    if (r.x == n || r.y == n) {
      *peer = r.x == n ? r.y : r.x;
      return &r;
    }
  return nullptr;
}

Name subject(const ProcP& p) { return p->x; }

}  // namespace

bool is_action(const ProcP& p) {
  switch (p->kind) {
    case PKind::Res:
    case PKind::Par:
    case PKind::Halt:
    case PKind::USend: return false;
    default: return true;
  }
}

ProcP canonicalize(const ProcP& p) { return from_soup(to_soup(p)); }

bool is_canonical(const ProcP& p) {
  if (p->kind == PKind::Halt) return true;
  const Proc* cur = p.get();
  while (cur->kind == PKind::Res) cur = cur->p.get();
  while (cur->kind == PKind::Par) {
    if (!is_action(cur->p)) return false;
    cur = cur->q.get();
  }
  return cur->kind != PKind::Res && cur->kind != PKind::Halt && cur->kind != PKind::USend;
}

namespace {

std::vector<PcpStep> soup_steps(const PSoup& s) {
  std::vector<PcpStep> out;
  auto emit = [&](const char* rule, PSoup next, std::vector<Name> names, const PRes& r) {
    PcpStep st;
    st.rule = rule;
    st.result = from_soup(to_soup(from_soup(next)));
    st.names = std::move(names);
    st.prio = r.ann ? PriorityBound::fin(r.ann->o) : PriorityBound::top();
    out.push_back(std::move(st));
  };
  for (std::size_t i = 0; i < s.procs.size(); ++i) {
    const ProcP& a = s.procs[i];
    if (a->kind == PKind::Link) {
      // (nu x y)(w <-> x || P) reduces to P{w/y}
      for (int side = 0; side < 2; ++side) {
        Name w = side ? a->y : a->x, x = side ? a->x : a->y, y;
        const PRes* r = find_res(s, x, &y);
        if (!r || y == w) continue;
        PSoup next = s;
        next.procs.erase(next.procs.begin() + static_cast<long>(i));
        for (auto& q : next.procs) q = rename_free(q, y, w);
        PRes keep = *r;
        std::erase_if(next.res, [&](const PRes& q) { return q.x == x || q.y == x; });
        emit("E-Link", std::move(next), {w, x}, keep);
      }
      continue;
    }
    PKind ka = a->kind;
    if (ka != PKind::Send && ka != PKind::Close && ka != PKind::Inl && ka != PKind::Inr) continue;
    Name y;
    const PRes* r = find_res(s, subject(a), &y);
    if (!r) continue;
    for (std::size_t j = 0; j < s.procs.size(); ++j) {
      const ProcP& b = s.procs[j];
      if (j == i || b->kind == PKind::Link || subject(b) != y) continue;
      PSoup next = s;
      PRes& nr = *std::find_if(next.res.begin(), next.res.end(), [&](const PRes& q) { return q.x == r->x; });
      if (ka == PKind::Send && b->kind == PKind::Recv) {
        next.procs[i] = a->p;
        next.procs[j] = b->p;
        PTypeP sender = r->ann ? (r->x == a->x ? r->ann : dual(r->ann)) : nullptr;
        PRes keep = *r;
        if (nr.ann) nr.ann = nr.ann->b;
        next.res.push_back({a->y, b->y, sender ? sender->a : nullptr});
        emit("E-Send", std::move(next), {a->x, y}, keep);
      } else if (ka == PKind::Close && b->kind == PKind::Wait) {
        next.procs[i] = a->p;
        next.procs[j] = b->p;
        PRes keep = *r;
        std::erase_if(next.res, [&](const PRes& q) { return q.x == r->x; });
        emit("E-Close", std::move(next), {a->x, y}, keep);
      } else if ((ka == PKind::Inl || ka == PKind::Inr) && b->kind == PKind::Offer) {
        bool left = ka == PKind::Inl;
        next.procs[i] = a->p;
        next.procs[j] = left ? b->p : b->q;
        PRes keep = *r;
        if (nr.ann) nr.ann = left ? nr.ann->a : nr.ann->b;
        emit(left ? "E-Select-Inl" : "E-Select-Inr", std::move(next), {a->x, y}, keep);
      }
    }
  }
  return out;
}

}  // namespace

std::vector<PcpStep> step(const ProcP& p) { return soup_steps(to_soup(expand_sugar(p))); }

namespace {

void shape_rec(const ProcP& p, std::map<Name, int>& bound, int& counter, std::vector<Name>& frees, std::string& out) {
  auto name = [&](const Name& n) {
    auto it = bound.find(n);
    if (it != bound.end()) {
      out += "b" + std::to_string(it->second) + " ";
    } else {
      out += "# ";
      frees.push_back(n);
    }
  };
  out += std::to_string(static_cast<int>(p->kind)) + "(";
  switch (p->kind) {
    case PKind::Halt: break;
    case PKind::Link:
    case PKind::USend:
      name(p->x);
      name(p->y);
      break;
    case PKind::Res:
      bound[p->x] = counter++;
      bound[p->y] = counter++;
      break;
    case PKind::Send:
    case PKind::Recv:
      name(p->x);
      bound[p->y] = counter++;
      break;
    default:
      if (!p->x.empty()) name(p->x);
  }
  if (p->p) shape_rec(p->p, bound, counter, frees, out);
  if (p->q) shape_rec(p->q, bound, counter, frees, out);
  out += ")";
}

}  // namespace

std::string canonical_key(const ProcP& p) {
  PSoup s = to_soup(expand_sugar(p));
  std::map<Name, Name> peer;
  std::map<Name, std::string> type_of;
  for (auto& r : s.res) {
    peer[r.x] = r.y, peer[r.y] = r.x;
    if (r.ann) type_of[r.x] = to_string(r.ann), type_of[r.y] = to_string(dual(r.ann));
  }
  struct Item {
    std::string text;
    std::vector<Name> frees;
    std::string sort_key;
  };
  std::vector<Item> items;
  std::map<Name, std::size_t> owner;
  for (auto& q : s.procs) {
    Item it;
    std::map<Name, int> bound;
    int counter = 0;
    shape_rec(q, bound, counter, it.frees, it.text);
    for (auto& f : it.frees) owner.emplace(f, items.size());
    it.text += "{";
    for (auto& f : it.frees) it.text += (type_of.count(f) ? type_of[f] : "") + ";";
    it.text += "}";
    items.push_back(std::move(it));
  }
  // one round of refinement: a thread is also told apart by its peers' shapes
  for (auto& it : items) {
    it.sort_key = it.text;
    for (auto& f : it.frees) {
      auto pf = peer.find(f);
      auto o = pf == peer.end() ? owner.end() : owner.find(pf->second);
      it.sort_key += "/" + (o == owner.end() ? std::string("-") : items[o->second].text);
    }
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const Item& a, const Item& b) { return a.sort_key < b.sort_key; });
  std::map<Name, int> ren;
  std::string out;
  for (auto& it : items) {
    out += it.text + "[";
    for (auto& f : it.frees) {
      if (!peer.count(f)) {
        out += "!" + f + ",";
        continue;
      }
      if (!ren.count(f)) {
        int n = static_cast<int>(ren.size());
        ren[f] = n;
      }
      out += std::to_string(ren[f]) + (ren.count(peer[f]) ? "~" + std::to_string(ren[peer[f]]) : "") + ",";
    }
    out += "]|";
  }
  return out;
}

PcpRun run(const ProcP& p0, int fuel, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ProcP p = canonicalize(expand_sugar(p0));
  PcpRun out;
  for (int n = 0;; ++n) {
    auto steps = soup_steps(to_soup(p));
    if (steps.empty()) {
      out.kind = p->kind == PKind::Halt ? PcpRun::Kind::Halt : PcpRun::Kind::Stuck;
      out.final = p;
      return out;
    }
    if (n >= fuel) {
      out.kind = PcpRun::Kind::FuelExhausted;
      out.final = p;
      return out;
    }
    std::size_t pick = 0;
    if (seed) {
      pick = std::uniform_int_distribution<std::size_t>(0, steps.size() - 1)(rng);
    } else {
      for (std::size_t i = 1; i < steps.size(); ++i)
        if (steps[i].prio < steps[pick].prio) pick = i;
    }
    p = steps[pick].result;
    out.trace.push_back(steps[pick]);
  }
}

std::string trace_to_json(const ProcP& initial, const std::vector<PcpStep>& trace, int indent) {
  nlohmann::json j;
  j["initial"] = to_string(initial);
  j["steps"] = nlohmann::json::array();
  for (auto& s : trace)
    j["steps"].push_back({{"rule", s.rule}, {"names", s.names}, {"process", to_string(s.result)}});
  return j.dump(indent);
}

}  // namespace pgv::pcp
