#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pgv/priority.hpp"

namespace pgv {

using Name = std::string;
using NameSet = std::set<Name>;

// Draws from the process-wide counter; `base` loses any previous numeric suffix.
Name fresh_name(const Name& base);
std::string base_of(const Name& n);

struct Span {
  int line = 0;
  int col = 0;
};

// ---------------------------------------------------------------- types

enum class TypeKind { Prod, Unit, Sum, Void, Fn, Send, Recv, EndS, EndR };

struct Type;
using TypeP = std::shared_ptr<const Type>;

struct Type {
  TypeKind kind;
  Priority o;             // Send, Recv, EndS, EndR
  PriorityBound p, q;     // Fn
  TypeP a, b;             // Prod/Sum parts, Fn dom/cod, Send/Recv payload/continuation

  bool is_session() const {
    return kind == TypeKind::Send || kind == TypeKind::Recv || kind == TypeKind::EndS ||
           kind == TypeKind::EndR;
  }
};

namespace ty {
TypeP unit();
TypeP void_();
TypeP prod(TypeP a, TypeP b);
TypeP sum(TypeP a, TypeP b);
TypeP fn(PriorityBound p, PriorityBound q, TypeP dom, TypeP cod);
TypeP pure_fn(TypeP dom, TypeP cod);
TypeP send(Priority o, TypeP payload, TypeP cont);
TypeP recv(Priority o, TypeP payload, TypeP cont);
TypeP end_send(Priority o);
TypeP end_recv(Priority o);
// Choice sugar: +o{S,S'} and &o{S,S'}, and their nullary forms.
TypeP select(Priority o, TypeP s1, TypeP s2);
TypeP offer(Priority o, TypeP s1, TypeP s2);
TypeP select_empty(Priority o);
TypeP offer_empty(Priority o);
}  // namespace ty

bool type_equal(const TypeP& a, const TypeP& b);
TypeP dual(const TypeP& s);
Priority pr(const TypeP& s);
PriorityBound minpr(const TypeP& t);

// Returns a message when some session type inside `t` has a connective
// whose priority is not strictly below everything reachable under it.
std::optional<std::string> check_well_formed(const TypeP& t);
bool has_unresolved_priority(const TypeP& t);

std::string to_string(const TypeP& t);

// ---------------------------------------------------------------- environments

struct TypeEnv {
  std::vector<std::pair<Name, TypeP>> entries;

  bool contains(const Name& n) const;
  TypeP lookup(const Name& n) const;
  void add(const Name& n, TypeP t);  // throws std::invalid_argument on duplicates
  bool remove(const Name& n);
  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
};

PriorityBound minpr(const TypeEnv& env);
std::string to_string(const TypeEnv& env);

// ---------------------------------------------------------------- terms

enum class Const { Link, New, Spawn, Send, Recv, Close, Wait };
const char* const_name(Const k);

enum class TermKind {
  Var, Const, Lam, App, Unit, Seq, Pair, LetPair, Inl, Inr, Case, Absurd,
  // surface sugar, removed by elaborate()
  Let, LamUnit, LamPair, Fork, Select, Offer, OfferEmpty
};

struct Term;
using TermP = std::shared_ptr<const Term>;

// Child layout per kind:
//   Lam(name: body)           App(fn, arg)          Seq(first, rest)
//   Pair(l, r)                LetPair(name, name2: scrut, body)
//   Inl/Inr(t)                Case(scrut, name: k1, name2: k2)
//   Absurd(t)                 Let(name: bound, body)
//   LamUnit(body)             LamPair(name, name2: body)
//   Fork(t)                   Select(t), `right` picks inr
//   Offer(scrut, name: k1, name2: k2)     OfferEmpty(scrut)
// `ann` holds: the Lam/LamPair binder type, S for new[S] and fork[S], the sum
// type of inl/inr, the result type of absurd and empty offers, and the full
// choice type of select.
struct Term {
  TermKind kind;
  Name name, name2;
  Const k = Const::Link;
  bool right = false;
  TypeP ann;
  std::vector<TermP> kids;
  Span span;
};

namespace tm {
TermP var(Name x);
TermP cnst(Const k, TypeP ann = nullptr);
TermP lam(Name x, TermP body, TypeP ann = nullptr);
TermP app(TermP f, TermP a);
TermP app(Const k, TermP a);
TermP unit();
TermP seq(TermP a, TermP b);
TermP pair(TermP a, TermP b);
TermP let_pair(Name x, Name y, TermP m, TermP body);
TermP inl(TermP t, TypeP ann = nullptr);
TermP inr(TermP t, TypeP ann = nullptr);
TermP case_(TermP m, Name x, TermP l, Name y, TermP r);
TermP absurd(TermP t, TypeP ann = nullptr);
TermP let(Name x, TermP m, TermP body);
TermP lam_unit(TermP body);
TermP lam_pair(Name x, Name y, TermP body, TypeP ann = nullptr);
TermP fork(TermP t, TypeP s = nullptr);
TermP select(bool right, TermP t, TypeP choice = nullptr);
TermP offer(TermP m, Name x, TermP l, Name y, TermP r);
TermP offer_empty(TermP m, TypeP ann = nullptr);
TermP with_kids(const TermP& t, std::vector<TermP> kids);
}  // namespace tm

bool is_sugar(TermKind k);
bool is_core(const TermP& t);
bool is_value(const TermP& t);

NameSet free_names(const TermP& t);
// M{V/x}. Binders are globally fresh, so no capture check is performed.
TermP substitute(const TermP& m, const TermP& v, const Name& x);
// Renames free occurrences only.
TermP rename_free(const TermP& m, const Name& from, const Name& to);
// Gives every binder a fresh name.
TermP freshen(const TermP& m);
bool alpha_equal(const TermP& a, const TermP& b);
std::size_t term_size(const TermP& t);

std::string to_string(const TermP& t);

// ---------------------------------------------------------------- configurations

enum class Flag { Main, Child };
std::optional<Flag> combine_flags(Flag a, Flag b);
const char* flag_name(Flag f);

enum class ConfKind { Thread, Par, Res };

struct Conf;
using ConfP = std::shared_ptr<const Conf>;

struct Conf {
  ConfKind kind;
  Flag flag = Flag::Child;
  TermP term;
  unsigned id = 0;        // creation order of a thread
  Name x, y;
  TypeP ann;              // type of x at a restriction; y has the dual
  ConfP c, d;
};

namespace cf {
ConfP thread(Flag f, TermP m, unsigned id = 0);
ConfP main(TermP m, unsigned id = 0);
ConfP child(TermP m, unsigned id = 0);
ConfP par(ConfP c, ConfP d);
ConfP res(Name x, Name y, ConfP c, TypeP ann = nullptr);
}  // namespace cf

NameSet free_names(const ConfP& c);
ConfP substitute(const ConfP& c, const Name& from, const Name& to);
std::string to_string(const ConfP& c);

}  // namespace pgv
