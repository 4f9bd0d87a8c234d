#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgv/syntax.hpp"

namespace pgv {

struct StepLabel {
  std::string rule;           // E-Lam, E-New, E-Send, ...
  unsigned thread = 0;        // id of the (first) thread involved
  std::vector<int> path;      // child indices from the thread's term to the redex
  std::vector<Name> names;    // endpoints touched
};

struct TraceStep {
  StepLabel label;
  ConfP config;
};

struct Trace {
  ConfP initial;
  std::vector<TraceStep> steps;
};

struct IllFormed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StuckNotNormal : std::runtime_error {
  ConfP config;
  StuckNotNormal(const std::string& msg, ConfP c) : std::runtime_error(msg), config(std::move(c)) {}
};

// ---------------------------------------------------------------- terms

std::optional<std::pair<TermP, StepLabel>> reduce_term_step(const TermP& m);

struct Readiness {
  bool ready = false;
  std::string what;             // new, spawn, link, send, recv, close, wait
  std::optional<Name> acts_on;  // set for the four communication actions
  std::vector<int> path;
};
Readiness is_ready(const TermP& m);

// ---------------------------------------------------------------- congruence

ConfP congruence_normalize(const ConfP& c);
bool congruent(const ConfP& c, const ConfP& d);
// Equal keys imply congruence; congruent configurations usually share a key.
std::string canonical_key(const ConfP& c);

bool is_canonical_form(const ConfP& c);
bool is_normal_form(const ConfP& c);

// ---------------------------------------------------------------- configurations

std::vector<std::pair<StepLabel, ConfP>> enabled_steps(const ConfP& c);

struct SchedulerPolicy {
  enum class Kind { MinPriorityFirst, SeededRandom, Exhaustive } kind = Kind::MinPriorityFirst;
  std::uint64_t seed = 0;
  int depth = 20;

  static SchedulerPolicy min_priority() { return {}; }
  static SchedulerPolicy random(std::uint64_t s) { return {Kind::SeededRandom, s, 20}; }
  static SchedulerPolicy exhaustive(int d) { return {Kind::Exhaustive, 0, d}; }
};
// Accepts min-priority, random:SEED, exhaustive:DEPTH.
std::optional<SchedulerPolicy> parse_policy(const std::string& s);

struct RunOutcome {
  enum class Kind { Value, NormalForm, FuelExhausted } kind;
  TermP value;   // Value
  ConfP config;  // final configuration in every case
};

// Called after every step with the step just taken; may throw to abort.
using StepHook = std::function<void(const TraceStep&)>;

// Throws StuckNotNormal when no step is enabled outside a normal form.
std::pair<RunOutcome, Trace> run(const ConfP& c, const SchedulerPolicy& policy, int fuel,
                                 const StepHook& hook = {});

std::string trace_to_json(const Trace& t, int indent = 2);

}  // namespace pgv
