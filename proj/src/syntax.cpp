#include "pgv/syntax.hpp"

#include <atomic>
#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>

namespace pgv {

namespace {
std::atomic<unsigned long> g_counter{0};
}

std::string base_of(const Name& n) {
  auto pos = n.rfind('_');
  if (pos == std::string::npos || pos == 0 || pos + 1 == n.size()) return n;
  for (std::size_t i = pos + 1; i < n.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(n[i]))) return n;
  return n.substr(0, pos);
}

Name fresh_name(const Name& base) {
  return base_of(base) + "_" + std::to_string(++g_counter);
}

// ---------------------------------------------------------------- types

namespace ty {
namespace {
TypeP mk(TypeKind k) {
  auto t = std::make_shared<Type>();
  t->kind = k;
  return t;
}
}  // namespace

TypeP unit() {
  static const TypeP u = mk(TypeKind::Unit);
  return u;
}
TypeP void_() {
  static const TypeP v = mk(TypeKind::Void);
  return v;
}
TypeP prod(TypeP a, TypeP b) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::Prod;
  t->a = std::move(a);
  t->b = std::move(b);
  return t;
}
TypeP sum(TypeP a, TypeP b) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::Sum;
  t->a = std::move(a);
  t->b = std::move(b);
  return t;
}
TypeP fn(PriorityBound p, PriorityBound q, TypeP dom, TypeP cod) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::Fn;
  t->p = std::move(p);
  t->q = std::move(q);
  t->a = std::move(dom);
  t->b = std::move(cod);
  return t;
}
TypeP pure_fn(TypeP dom, TypeP cod) {
  return fn(PriorityBound::top(), PriorityBound::bot(), std::move(dom), std::move(cod));
}
TypeP send(Priority o, TypeP payload, TypeP cont) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::Send;
  t->o = std::move(o);
  t->a = std::move(payload);
  t->b = std::move(cont);
  return t;
}
TypeP recv(Priority o, TypeP payload, TypeP cont) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::Recv;
  t->o = std::move(o);
  t->a = std::move(payload);
  t->b = std::move(cont);
  return t;
}
TypeP end_send(Priority o) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::EndS;
  t->o = std::move(o);
  return t;
}
TypeP end_recv(Priority o) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::EndR;
  t->o = std::move(o);
  return t;
}

static Priority succ(const Priority& o) {
  if (o.unresolved()) return Priority(-1, o.hole, o.offset + 1);
  return Priority(o.value + 1, o.hole, o.hole.empty() ? 0 : o.offset + 1);
}

TypeP select(Priority o, TypeP s1, TypeP s2) {
  return send(o, sum(dual(s1), dual(s2)), end_send(succ(o)));
}
TypeP offer(Priority o, TypeP s1, TypeP s2) {
  return recv(o, sum(std::move(s1), std::move(s2)), end_recv(succ(o)));
}
TypeP select_empty(Priority o) { return send(o, void_(), end_send(succ(o))); }
TypeP offer_empty(Priority o) { return recv(o, void_(), end_recv(succ(o))); }
}  // namespace ty

bool type_equal(const TypeP& a, const TypeP& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case TypeKind::Unit:
    case TypeKind::Void: return true;
    case TypeKind::Prod:
    case TypeKind::Sum: return type_equal(a->a, b->a) && type_equal(a->b, b->b);
    case TypeKind::Fn:
      return a->p == b->p && a->q == b->q && type_equal(a->a, b->a) && type_equal(a->b, b->b);
    case TypeKind::Send:
    case TypeKind::Recv:
      return a->o == b->o && type_equal(a->a, b->a) && type_equal(a->b, b->b);
    case TypeKind::EndS:
    case TypeKind::EndR: return a->o == b->o;
  }
  return false;
}

TypeP dual(const TypeP& s) {
  switch (s->kind) {
    case TypeKind::Send: return ty::recv(s->o, s->a, dual(s->b));
    case TypeKind::Recv: return ty::send(s->o, s->a, dual(s->b));
    case TypeKind::EndS: return ty::end_recv(s->o);
    case TypeKind::EndR: return ty::end_send(s->o);
    default: throw std::invalid_argument("dual of non-session type " + to_string(s));
  }
}

Priority pr(const TypeP& s) {
  if (!s->is_session()) throw std::invalid_argument("pr of non-session type " + to_string(s));
  return s->o;
}

PriorityBound minpr(const TypeP& t) {
  switch (t->kind) {
    case TypeKind::Prod:
    case TypeKind::Sum: return meet(minpr(t->a), minpr(t->b));
    case TypeKind::Fn: return t->p;
    case TypeKind::Unit:
    case TypeKind::Void: return PriorityBound::top();
    default: return PriorityBound::fin(t->o);
  }
}

std::optional<std::string> check_well_formed(const TypeP& t) {
  switch (t->kind) {
    case TypeKind::Unit:
    case TypeKind::Void:
    case TypeKind::EndS:
    case TypeKind::EndR: return std::nullopt;
    case TypeKind::Prod:
    case TypeKind::Sum:
    case TypeKind::Fn: {
      if (auto e = check_well_formed(t->a)) return e;
      return check_well_formed(t->b);
    }
    case TypeKind::Send:
    case TypeKind::Recv: {
      if (auto e = check_well_formed(t->a)) return e;
      if (auto e = check_well_formed(t->b)) return e;
      auto o = PriorityBound::fin(t->o);
      auto rest = meet(minpr(t->a), PriorityBound::fin(t->b->o));
      if (!(o < rest))
        return "top-most connective of " + to_string(t) + " does not hold the smallest priority";
      return std::nullopt;
    }
  }
  return std::nullopt;
}

bool has_unresolved_priority(const TypeP& t) {
  if (!t) return false;
  switch (t->kind) {
    case TypeKind::Unit:
    case TypeKind::Void: return false;
    case TypeKind::Prod:
    case TypeKind::Sum: return has_unresolved_priority(t->a) || has_unresolved_priority(t->b);
    case TypeKind::Fn:
      return (t->p.is_fin() && t->p.o.unresolved()) || (t->q.is_fin() && t->q.o.unresolved()) ||
             has_unresolved_priority(t->a) || has_unresolved_priority(t->b);
    case TypeKind::Send:
    case TypeKind::Recv:
      return t->o.unresolved() || has_unresolved_priority(t->a) || has_unresolved_priority(t->b);
    case TypeKind::EndS:
    case TypeKind::EndR: return t->o.unresolved();
  }
  return false;
}

namespace {
// 0: arrows and session prefixes, 1: sums, 2: products, 3: atoms
int type_level(const TypeP& t) {
  switch (t->kind) {
    case TypeKind::Fn:
    case TypeKind::Send:
    case TypeKind::Recv: return 0;
    case TypeKind::Sum: return 1;
    case TypeKind::Prod: return 2;
    default: return 3;
  }
}

void print_type(std::ostream& os, const TypeP& t, int ctx) {
  bool paren = type_level(t) < ctx;
  if (paren) os << '(';
  switch (t->kind) {
    case TypeKind::Unit: os << '1'; break;
    case TypeKind::Void: os << '0'; break;
    case TypeKind::Prod:
      print_type(os, t->a, 2);
      os << " * ";
      print_type(os, t->b, 3);
      break;
    case TypeKind::Sum:
      print_type(os, t->a, 1);
      os << " + ";
      print_type(os, t->b, 2);
      break;
    case TypeKind::Fn:
      print_type(os, t->a, 1);
      if (t->p.is_top() && t->q.is_bot())
        os << " -o ";
      else
        os << " -o[" << to_string(t->p) << ',' << to_string(t->q) << "]-> ";
      print_type(os, t->b, 0);
      break;
    case TypeKind::Send:
    case TypeKind::Recv:
      os << (t->kind == TypeKind::Send ? '!' : '?') << to_string(t->o) << ' ';
      print_type(os, t->a, 0);
      os << " . ";
      print_type(os, t->b, 0);
      break;
    case TypeKind::EndS: os << "end! " << to_string(t->o); break;
    case TypeKind::EndR: os << "end? " << to_string(t->o); break;
  }
  if (paren) os << ')';
}
}  // namespace

std::string to_string(const TypeP& t) {
  if (!t) return "<none>";
  std::ostringstream os;
  print_type(os, t, 0);
  return os.str();
}

// ---------------------------------------------------------------- environments

bool TypeEnv::contains(const Name& n) const {
  for (auto& e : entries)
    if (e.first == n) return true;
  return false;
}

TypeP TypeEnv::lookup(const Name& n) const {
  for (auto& e : entries)
    if (e.first == n) return e.second;
  return nullptr;
}

void TypeEnv::add(const Name& n, TypeP t) {
  if (contains(n)) throw std::invalid_argument("duplicate name in environment: " + n);
  entries.emplace_back(n, std::move(t));
}

bool TypeEnv::remove(const Name& n) {
  for (auto it = entries.begin(); it != entries.end(); ++it)
    if (it->first == n) {
      entries.erase(it);
      return true;
    }
  return false;
}

PriorityBound minpr(const TypeEnv& env) {
  auto m = PriorityBound::top();
  for (auto& e : env.entries) m = meet(m, minpr(e.second));
  return m;
}

std::string to_string(const TypeEnv& env) {
  std::string s;
  for (auto& e : env.entries) {
    if (!s.empty()) s += ", ";
    s += e.first + " : " + to_string(e.second);
  }
  return s.empty() ? "{}" : "{" + s + "}";
}

// ---------------------------------------------------------------- terms

const char* const_name(Const k) {
  switch (k) {
    case Const::Link: return "link";
    case Const::New: return "new";
    case Const::Spawn: return "spawn";
    case Const::Send: return "send";
    case Const::Recv: return "recv";
    case Const::Close: return "close";
    case Const::Wait: return "wait";
  }
  return "?";
}

namespace tm {
namespace {
std::shared_ptr<Term> mk(TermKind k) {
  auto t = std::make_shared<Term>();
  t->kind = k;
  return t;
}
}  // namespace

TermP var(Name x) {
  auto t = mk(TermKind::Var);
  t->name = std::move(x);
  return t;
}
TermP cnst(Const k, TypeP ann) {
  auto t = mk(TermKind::Const);
  t->k = k;
  t->ann = std::move(ann);
  return t;
}
TermP lam(Name x, TermP body, TypeP ann) {
  auto t = mk(TermKind::Lam);
  t->name = std::move(x);
  t->ann = std::move(ann);
  t->kids = {std::move(body)};
  return t;
}
TermP app(TermP f, TermP a) {
  auto t = mk(TermKind::App);
  t->kids = {std::move(f), std::move(a)};
  return t;
}
TermP app(Const k, TermP a) { return app(cnst(k), std::move(a)); }
TermP unit() {
  static const TermP u = mk(TermKind::Unit);
  return u;
}
TermP seq(TermP a, TermP b) {
  auto t = mk(TermKind::Seq);
  t->kids = {std::move(a), std::move(b)};
  return t;
}
TermP pair(TermP a, TermP b) {
  auto t = mk(TermKind::Pair);
  t->kids = {std::move(a), std::move(b)};
  return t;
}
TermP let_pair(Name x, Name y, TermP m, TermP body) {
  auto t = mk(TermKind::LetPair);
  t->name = std::move(x);
  t->name2 = std::move(y);
  t->kids = {std::move(m), std::move(body)};
  return t;
}
TermP inl(TermP a, TypeP ann) {
  auto t = mk(TermKind::Inl);
  t->ann = std::move(ann);
  t->kids = {std::move(a)};
  return t;
}
TermP inr(TermP a, TypeP ann) {
  auto t = mk(TermKind::Inr);
  t->ann = std::move(ann);
  t->kids = {std::move(a)};
  return t;
}
TermP case_(TermP m, Name x, TermP l, Name y, TermP r) {
  auto t = mk(TermKind::Case);
  t->name = std::move(x);
  t->name2 = std::move(y);
  t->kids = {std::move(m), std::move(l), std::move(r)};
  return t;
}
TermP absurd(TermP a, TypeP ann) {
  auto t = mk(TermKind::Absurd);
  t->ann = std::move(ann);
  t->kids = {std::move(a)};
  return t;
}
TermP let(Name x, TermP m, TermP body) {
  auto t = mk(TermKind::Let);
  t->name = std::move(x);
  t->kids = {std::move(m), std::move(body)};
  return t;
}
TermP lam_unit(TermP body) {
  auto t = mk(TermKind::LamUnit);
  t->kids = {std::move(body)};
  return t;
}
TermP lam_pair(Name x, Name y, TermP body, TypeP ann) {
  auto t = mk(TermKind::LamPair);
  t->name = std::move(x);
  t->name2 = std::move(y);
  t->ann = std::move(ann);
  t->kids = {std::move(body)};
  return t;
}
TermP fork(TermP a, TypeP s) {
  auto t = mk(TermKind::Fork);
  t->ann = std::move(s);
  t->kids = {std::move(a)};
  return t;
}
TermP select(bool right, TermP a, TypeP choice) {
  auto t = mk(TermKind::Select);
  t->right = right;
  t->ann = std::move(choice);
  t->kids = {std::move(a)};
  return t;
}
TermP offer(TermP m, Name x, TermP l, Name y, TermP r) {
  auto t = mk(TermKind::Offer);
  t->name = std::move(x);
  t->name2 = std::move(y);
  t->kids = {std::move(m), std::move(l), std::move(r)};
  return t;
}
TermP offer_empty(TermP m, TypeP ann) {
  auto t = mk(TermKind::OfferEmpty);
  t->ann = std::move(ann);
  t->kids = {std::move(m)};
  return t;
}
TermP with_kids(const TermP& t, std::vector<TermP> kids) {
  auto c = std::make_shared<Term>(*t);
  c->kids = std::move(kids);
  return c;
}
}  // namespace tm

bool is_sugar(TermKind k) {
  switch (k) {
    case TermKind::Let:
    case TermKind::LamUnit:
    case TermKind::LamPair:
    case TermKind::Fork:
    case TermKind::Select:
    case TermKind::Offer:
    case TermKind::OfferEmpty: return true;
    default: return false;
  }
}

bool is_core(const TermP& t) {
  if (is_sugar(t->kind)) return false;
  for (auto& k : t->kids)
    if (!is_core(k)) return false;
  return true;
}

bool is_value(const TermP& t) {
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::Const:
    case TermKind::Lam:
    case TermKind::Unit: return true;
    case TermKind::Pair: return is_value(t->kids[0]) && is_value(t->kids[1]);
    case TermKind::Inl:
    case TermKind::Inr: return is_value(t->kids[0]);
    default: return false;
  }
}

namespace {
// Names bound by `t` inside its i-th child.
std::vector<const Name*> bound_in(const Term& t, std::size_t i) {
  switch (t.kind) {
    case TermKind::Lam: return {&t.name};
    case TermKind::LetPair:
      if (i == 1) return {&t.name, &t.name2};
      return {};
    case TermKind::Let:
      if (i == 1) return {&t.name};
      return {};
    case TermKind::LamPair: return {&t.name, &t.name2};
    case TermKind::Case:
    case TermKind::Offer:
      if (i == 1) return {&t.name};
      if (i == 2) return {&t.name2};
      return {};
    default: return {};
  }
}

bool binds(const Term& t, std::size_t i, const Name& x) {
  for (auto* n : bound_in(t, i))
    if (*n == x) return true;
  return false;
}

void collect_free(const TermP& t, NameSet& out) {
  if (t->kind == TermKind::Var) {
    out.insert(t->name);
    return;
  }
  for (std::size_t i = 0; i < t->kids.size(); ++i) {
    NameSet sub;
    collect_free(t->kids[i], sub);
    for (auto* n : bound_in(*t, i)) sub.erase(*n);
    out.insert(sub.begin(), sub.end());
  }
}
}  // namespace

NameSet free_names(const TermP& t) {
  NameSet s;
  collect_free(t, s);
  return s;
}

TermP substitute(const TermP& m, const TermP& v, const Name& x) {
  if (m->kind == TermKind::Var) return m->name == x ? v : m;
  if (m->kids.empty()) return m;
  std::vector<TermP> kids;
  kids.reserve(m->kids.size());
  bool changed = false;
  for (std::size_t i = 0; i < m->kids.size(); ++i) {
    TermP k = binds(*m, i, x) ? m->kids[i] : substitute(m->kids[i], v, x);
    changed |= k != m->kids[i];
    kids.push_back(std::move(k));
  }
  return changed ? tm::with_kids(m, std::move(kids)) : m;
}

TermP rename_free(const TermP& m, const Name& from, const Name& to) {
  return substitute(m, tm::var(to), from);
}

namespace {
TermP freshen_rec(const TermP& m, std::map<Name, Name>& ren) {
  if (m->kind == TermKind::Var) {
    auto it = ren.find(m->name);
    return it == ren.end() ? m : tm::var(it->second);
  }
  auto c = std::make_shared<Term>(*m);
  for (std::size_t i = 0; i < m->kids.size(); ++i) {
    auto saved = ren;
    auto bs = bound_in(*m, i);
    for (auto* n : bs) {
      Name fresh;
      if (n == &m->name) {
        if (c->name == m->name) c->name = fresh_name(m->name);
        fresh = c->name;
      } else {
        if (c->name2 == m->name2) c->name2 = fresh_name(m->name2);
        fresh = c->name2;
      }
      ren[*n] = fresh;
    }
    c->kids[i] = freshen_rec(m->kids[i], ren);
    ren = std::move(saved);
  }
  return c;
}

bool alpha_rec(const TermP& a, const TermP& b, std::map<Name, Name>& ab, std::map<Name, Name>& ba) {
  if (a->kind != b->kind || a->kids.size() != b->kids.size()) return false;
  switch (a->kind) {
    case TermKind::Var: {
      auto ia = ab.find(a->name);
      auto ib = ba.find(b->name);
      if (ia == ab.end() && ib == ba.end()) return a->name == b->name;
      return ia != ab.end() && ib != ba.end() && ia->second == b->name && ib->second == a->name;
    }
    case TermKind::Const:
      if (a->k != b->k) return false;
      break;
    case TermKind::Select:
      if (a->right != b->right) return false;
      break;
    default: break;
  }
  if ((a->ann == nullptr) != (b->ann == nullptr)) return false;
  if (a->ann && !type_equal(a->ann, b->ann)) return false;
  for (std::size_t i = 0; i < a->kids.size(); ++i) {
    auto na = bound_in(*a, i);
    auto nb = bound_in(*b, i);
    std::vector<std::pair<Name, std::optional<Name>>> saved_ab, saved_ba;
    for (std::size_t j = 0; j < na.size(); ++j) {
      auto ia = ab.find(*na[j]);
      saved_ab.emplace_back(*na[j], ia == ab.end() ? std::nullopt : std::optional<Name>(ia->second));
      auto ib = ba.find(*nb[j]);
      saved_ba.emplace_back(*nb[j], ib == ba.end() ? std::nullopt : std::optional<Name>(ib->second));
      ab[*na[j]] = *nb[j];
      ba[*nb[j]] = *na[j];
    }
    bool ok = alpha_rec(a->kids[i], b->kids[i], ab, ba);
    for (auto it = saved_ab.rbegin(); it != saved_ab.rend(); ++it)
      if (it->second) ab[it->first] = *it->second; else ab.erase(it->first);
    for (auto it = saved_ba.rbegin(); it != saved_ba.rend(); ++it)
      if (it->second) ba[it->first] = *it->second; else ba.erase(it->first);
    if (!ok) return false;
  }
  return true;
}
}  // namespace

TermP freshen(const TermP& m) {
  std::map<Name, Name> ren;
  return freshen_rec(m, ren);
}

bool alpha_equal(const TermP& a, const TermP& b) {
  std::map<Name, Name> ab, ba;
  return alpha_rec(a, b, ab, ba);
}

std::size_t term_size(const TermP& t) {
  std::size_t n = 1;
  for (auto& k : t->kids) n += term_size(k);
  return n;
}

namespace {
// 0: binding forms and sequencing, 1: application and prefix forms, 2: atoms
int term_level(const TermP& t) {
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::Const:
    case TermKind::Unit:
    case TermKind::Pair: return 2;
    case TermKind::App:
    case TermKind::Inl:
    case TermKind::Inr:
    case TermKind::Absurd:
    case TermKind::Fork:
    case TermKind::Select: return 1;
    default: return 0;
  }
}

void print_term(std::ostream& os, const TermP& t, int ctx) {
  bool paren = term_level(t) < ctx;
  if (paren) os << '(';
  auto ann = [&](const TypeP& a) {
    if (a) os << '[' << to_string(a) << ']';
  };
  switch (t->kind) {
    case TermKind::Var: os << t->name; break;
    case TermKind::Const:
      os << const_name(t->k);
      ann(t->ann);
      break;
    case TermKind::Unit: os << "()"; break;
    case TermKind::Pair:
      os << '(';
      print_term(os, t->kids[0], 0);
      os << ", ";
      print_term(os, t->kids[1], 0);
      os << ')';
      break;
    case TermKind::App:
      print_term(os, t->kids[0], 1);
      os << ' ';
      print_term(os, t->kids[1], 2);
      break;
    case TermKind::Inl:
    case TermKind::Inr:
    case TermKind::Absurd:
    case TermKind::Fork:
      os << (t->kind == TermKind::Inl ? "inl" : t->kind == TermKind::Inr ? "inr"
             : t->kind == TermKind::Absurd ? "absurd" : "fork");
      ann(t->ann);
      os << ' ';
      print_term(os, t->kids[0], 2);
      break;
    case TermKind::Select:
      os << "select";
      ann(t->ann);
      os << (t->right ? " inr " : " inl ");
      print_term(os, t->kids[0], 2);
      break;
    case TermKind::Lam:
      if (t->ann) os << "\\(" << t->name << " : " << to_string(t->ann) << "). ";
      else os << '\\' << t->name << ". ";
      print_term(os, t->kids[0], 0);
      break;
    case TermKind::LamUnit:
      os << "\\(). ";
      print_term(os, t->kids[0], 0);
      break;
    case TermKind::LamPair:
      os << "\\(" << t->name << ", " << t->name2 << ')';
      if (t->ann) os << " : " << to_string(t->ann);
      os << ". ";
      print_term(os, t->kids[0], 0);
      break;
    case TermKind::Seq:
      print_term(os, t->kids[0], 1);
      os << "; ";
      print_term(os, t->kids[1], 0);
      break;
    case TermKind::Let:
      os << "let " << t->name << " = ";
      print_term(os, t->kids[0], 0);
      os << " in ";
      print_term(os, t->kids[1], 0);
      break;
    case TermKind::LetPair:
      os << "let (" << t->name << ", " << t->name2 << ") = ";
      print_term(os, t->kids[0], 0);
      os << " in ";
      print_term(os, t->kids[1], 0);
      break;
    case TermKind::Case:
    case TermKind::Offer:
      os << (t->kind == TermKind::Case ? "case " : "offer ");
      print_term(os, t->kids[0], 1);
      os << " { inl " << t->name << " -> ";
      print_term(os, t->kids[1], 0);
      os << " ; inr " << t->name2 << " -> ";
      print_term(os, t->kids[2], 0);
      os << " }";
      break;
    case TermKind::OfferEmpty:
      os << "offer";
      ann(t->ann);
      os << ' ';
      print_term(os, t->kids[0], 1);
      os << " {}";
      break;
  }
  if (paren) os << ')';
}
}  // namespace

std::string to_string(const TermP& t) {
  std::ostringstream os;
  print_term(os, t, 0);
  return os.str();
}

// ---------------------------------------------------------------- configurations

std::optional<Flag> combine_flags(Flag a, Flag b) {
  if (a == Flag::Main && b == Flag::Main) return std::nullopt;
  return (a == Flag::Main || b == Flag::Main) ? Flag::Main : Flag::Child;
}

const char* flag_name(Flag f) { return f == Flag::Main ? "main" : "child"; }

namespace cf {
ConfP thread(Flag f, TermP m, unsigned id) {
  auto c = std::make_shared<Conf>();
  c->kind = ConfKind::Thread;
  c->flag = f;
  c->term = std::move(m);
  c->id = id;
  return c;
}
ConfP main(TermP m, unsigned id) { return thread(Flag::Main, std::move(m), id); }
ConfP child(TermP m, unsigned id) { return thread(Flag::Child, std::move(m), id); }
ConfP par(ConfP a, ConfP b) {
  auto c = std::make_shared<Conf>();
  c->kind = ConfKind::Par;
  c->c = std::move(a);
  c->d = std::move(b);
  return c;
}
ConfP res(Name x, Name y, ConfP body, TypeP ann) {
  auto c = std::make_shared<Conf>();
  c->kind = ConfKind::Res;
  c->x = std::move(x);
  c->y = std::move(y);
  c->ann = std::move(ann);
  c->c = std::move(body);
  return c;
}
}  // namespace cf

NameSet free_names(const ConfP& c) {
  switch (c->kind) {
    case ConfKind::Thread: return free_names(c->term);
    case ConfKind::Par: {
      auto s = free_names(c->c);
      auto t = free_names(c->d);
      s.insert(t.begin(), t.end());
      return s;
    }
    case ConfKind::Res: {
      auto s = free_names(c->c);
      s.erase(c->x);
      s.erase(c->y);
      return s;
    }
  }
  return {};
}

ConfP substitute(const ConfP& c, const Name& from, const Name& to) {
  switch (c->kind) {
    case ConfKind::Thread: return cf::thread(c->flag, rename_free(c->term, from, to), c->id);
    case ConfKind::Par: return cf::par(substitute(c->c, from, to), substitute(c->d, from, to));
    case ConfKind::Res:
      if (c->x == from || c->y == from) return c;
      return cf::res(c->x, c->y, substitute(c->c, from, to), c->ann);
  }
  return c;
}

namespace {
void print_conf(std::ostream& os, const ConfP& c, int ctx) {
  switch (c->kind) {
    case ConfKind::Thread:
      os << flag_name(c->flag) << ' ' << to_string(c->term);
      break;
    case ConfKind::Par:
      if (ctx > 0) os << '(';
      print_conf(os, c->c, 1);
      os << " || ";
      print_conf(os, c->d, 0);
      if (ctx > 0) os << ')';
      break;
    case ConfKind::Res:
      if (ctx > 0) os << '(';
      os << "(nu " << c->x << ' ' << c->y;
      if (c->ann) os << " : " << to_string(c->ann);
      os << ") ";
      print_conf(os, c->c, 0);
      if (ctx > 0) os << ')';
      break;
  }
}
}  // namespace

std::string to_string(const ConfP& c) {
  std::ostringstream os;
  print_conf(os, c, 0);
  return os.str();
}

}  // namespace pgv
