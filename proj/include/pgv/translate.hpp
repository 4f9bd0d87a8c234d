#pragma once

#include <string>
#include <vector>

#include "pgv/eval.hpp"
#include "pgv/pcp.hpp"
#include "pgv/syntax.hpp"

namespace pgv::translate {

TypeP translate_type(const pcp::PTypeP& a);
TypeEnv translate_env(const pcp::PcpEnv& env);

// Both translations need the session type of every free name of `p`
// and an annotation on every restriction.
TermP translate_term(const pcp::PcpEnv& env, const pcp::ProcP& p);
ConfP translate_config(const pcp::PcpEnv& env, const pcp::ProcP& p);

struct LemmaViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MtoCVerdict {
  bool equal = false;  // child ⟦P⟧M is already ⟦P⟧C
  int steps = 0;       // otherwise the length of the shortest path found
  int successors = 0;  // one-step successors checked for the confluence clause
};

// Throws LemmaViolation.
MtoCVerdict check_M_to_C(const pcp::PcpEnv& env, const pcp::ProcP& p, int depth = 200);

enum class EdgeStatus { Matched, ExceededBound, Mismatch };
const char* edge_status_name(EdgeStatus s);

struct EdgeReport {
  std::string edge;              // the PCP rule, or the PGV rule for soundness
  std::string target;            // printed PCP process the edge must meet
  std::vector<StepLabel> path;   // PGV steps taken
  EdgeStatus status = EdgeStatus::Mismatch;
};

struct CorrespondenceReport {
  std::string source;
  std::string direction;  // completeness | soundness
  std::vector<EdgeReport> edges;

  int count(EdgeStatus s) const;
};

struct SearchLimits {
  int depth = 20;
  std::size_t max_states = 20000;
};

CorrespondenceReport check_completeness(const pcp::PcpEnv& env, const pcp::ProcP& p, SearchLimits lim = {});
CorrespondenceReport check_soundness(const pcp::PcpEnv& env, const pcp::ProcP& p, SearchLimits lim = {});

std::string report_to_json(const std::vector<CorrespondenceReport>& reports, int indent = 2);

// Milner's cyclic scheduler with trivial task bodies, priorities a_i = 3(i-1),
// b_i = a_i + 1, c_i = a_i + 2 and d = 3n.
std::string milner_pcp_source(int n);
pcp::ProcP milner_pcp(int n);
// The same scheduler written directly in PGV: proc_1 is the main thread.
std::string milner_pgv_source(int n);

// Identifies M with M; () and the main flag with the child flag.
ConfP strip_unit_tails(const ConfP& c);

}  // namespace pgv::translate
