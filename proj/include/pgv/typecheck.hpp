#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pgv/syntax.hpp"

namespace pgv {

enum class ErrorKind {
  UnboundName,
  NonLinearUse,
  EnvOverlap,
  PriorityViolation,
  TypeMismatch,
  MainMainClash,
  DualityMismatch,
  SchemaInstantiationFailure,
  MissingAnnotation,
  IllFormedType,
};
const char* error_kind_name(ErrorKind k);

struct TypeError : std::runtime_error {
  ErrorKind kind;
  std::string constraint;  // e.g. "p < minpr(Delta)" for priority violations
  PriorityBound lhs, rhs;
  std::string rule;
  Span span;
  TypeError(ErrorKind k, const std::string& msg, Span s = {})
      : std::runtime_error(msg), kind(k), span(s) {}
};

struct ConstraintCheck {
  std::string constraint;
  PriorityBound lhs, rhs;
  bool ok;
};

struct Derivation {
  std::string rule;
  std::string judgement;
  std::vector<ConstraintCheck> checks;
  std::vector<std::shared_ptr<Derivation>> kids;
};
using DerivationP = std::shared_ptr<Derivation>;

std::string to_string(const Derivation& d);
// Re-evaluates every recorded constraint; true when all still hold.
bool replay(const Derivation& d);

struct TermTyping {
  TypeEnv env_used;
  TypeP ty;
  PriorityBound bound;
  DerivationP derivation;  // only when requested
};

struct ConfigTyping {
  Flag flag;
  DerivationP derivation;
};

// Γ ⊢p M : T. Every binding of `env` must be used exactly once.
// `expected` only guides annotation-free binders and injections.
TermTyping typecheck_term(const TypeEnv& env, const TermP& m, const TypeP& expected = nullptr,
                          bool want_derivation = false);
std::variant<TermTyping, TypeError> try_typecheck_term(const TypeEnv& env, const TermP& m,
                                                       const TypeP& expected = nullptr);

// Γ ⊢φ C.
ConfigTyping typecheck_config(const TypeEnv& env, const ConfP& c, bool want_derivation = false);
std::variant<ConfigTyping, TypeError> try_typecheck_config(const TypeEnv& env, const ConfP& c);

// For `new`, `arg` is the requested session type S; otherwise it is the
// argument type the schema is matched against.
TypeP instantiate_constant(Const k, const TypeP& arg);

// Session type for a restriction without an annotation, read off the first
// annotated binder its endpoints flow into. Throws MissingAnnotation.
TypeP infer_restriction_type(const Name& x, const Name& y, const ConfP& body);

}  // namespace pgv
