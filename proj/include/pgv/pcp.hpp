#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pgv/syntax.hpp"
#include "pgv/typecheck.hpp"

namespace pgv::pcp {

// ---------------------------------------------------------------- types

enum class TKind { Tensor, Parr, One, Bot, Plus, With, Nil, Top };

struct PType;
using PTypeP = std::shared_ptr<const PType>;

struct PType {
  TKind kind;
  Priority o;
  PTypeP a, b;  // binary connectives only
};

namespace pty {
PTypeP tensor(Priority o, PTypeP a, PTypeP b);
PTypeP parr(Priority o, PTypeP a, PTypeP b);
PTypeP one(Priority o);
PTypeP bot(Priority o);
PTypeP plus(Priority o, PTypeP a, PTypeP b);
PTypeP with(Priority o, PTypeP a, PTypeP b);
PTypeP nil(Priority o);
PTypeP top(Priority o);
PTypeP make(TKind k, Priority o, PTypeP a = nullptr, PTypeP b = nullptr);
}  // namespace pty

bool is_binary(TKind k);
bool type_equal(const PTypeP& a, const PTypeP& b);
PTypeP dual(const PTypeP& a);
Priority pr(const PTypeP& a);
std::optional<std::string> check_well_formed(const PTypeP& a);
std::string to_string(const PTypeP& a);

struct PcpEnv {
  std::vector<std::pair<Name, PTypeP>> entries;
  PTypeP lookup(const Name& n) const;
  void add(const Name& n, PTypeP t);
};
PriorityBound minpr(const PcpEnv& env);
std::string to_string(const PcpEnv& env);

// ---------------------------------------------------------------- processes

enum class PKind { Link, Res, Par, Halt, Send, Close, Recv, Wait, Inl, Inr, Offer, Absurd, USend };

struct Proc;
using ProcP = std::shared_ptr<const Proc>;

// Send/Recv bind y in p; Res binds x and y in p (ann is the type of x);
// Offer continues with p and q; USend(x, y, p) sends the free name y.
struct Proc {
  PKind kind;
  Name x, y;
  PTypeP ann;
  ProcP p, q;
};

namespace pp {
ProcP link(Name x, Name y);
ProcP res(Name x, Name y, ProcP p, PTypeP ann = nullptr);
ProcP par(ProcP p, ProcP q);
ProcP halt();
ProcP send(Name x, Name y, ProcP p);
ProcP usend(Name x, Name y, ProcP p);
ProcP close(Name x, ProcP p);
ProcP recv(Name x, Name y, ProcP p);
ProcP wait(Name x, ProcP p);
ProcP inl(Name x, ProcP p);
ProcP inr(Name x, ProcP p);
ProcP offer(Name x, ProcP p, ProcP q);
ProcP absurd(Name x);
}  // namespace pp

PTypeP parse_type(const std::string& text);
ProcP parse_process(const std::string& text);
std::string to_string(const ProcP& p);

// x<y>.P becomes x[z].(z<->y || P).
ProcP expand_sugar(const ProcP& p);

NameSet free_names(const ProcP& p);
ProcP rename_free(const ProcP& p, const Name& from, const Name& to);

// ---------------------------------------------------------------- typing

struct PcpTyping {
  PcpEnv env;
  DerivationP derivation;
};

// P |- env. Every binding must be used exactly once. Throws TypeError.
PcpTyping typecheck(const PcpEnv& env, const ProcP& p, bool want_derivation = false);

// ---------------------------------------------------------------- reduction

struct PcpStep {
  std::string rule;
  ProcP result;
  std::vector<Name> names;
  PriorityBound prio = PriorityBound::top();
};

std::vector<PcpStep> step(const ProcP& p);

ProcP canonicalize(const ProcP& p);
bool is_canonical(const ProcP& p);
// Equal keys imply the processes are equal up to congruence and renaming.
std::string canonical_key(const ProcP& p);
bool is_action(const ProcP& p);

struct PcpRun {
  enum class Kind { Halt, Stuck, FuelExhausted } kind;
  ProcP final;
  std::vector<PcpStep> trace;
};

// Picks the enabled step whose restriction has the smallest priority;
// with seed != 0 picks uniformly at random instead.
PcpRun run(const ProcP& p, int fuel, std::uint64_t seed = 0);

std::string trace_to_json(const ProcP& initial, const std::vector<PcpStep>& trace, int indent = 2);

}  // namespace pgv::pcp
