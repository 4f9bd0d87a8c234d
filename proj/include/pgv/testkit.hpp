#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pgv/parse.hpp"
#include "pgv/pcp.hpp"
#include "pgv/syntax.hpp"

namespace pgv::testkit {

struct GenBudget {
  int max_depth = 4;     // communication events per initial session
  int max_sessions = 3;  // sessions created up front
  int max_priority = 4;  // range searched by find_annotations
  std::uint64_t seed = 1;
};

// A closed, well-typed program whose main thread is the whole source.
// With no sessions it creates no endpoints at all.
std::string gen_pgv_source(const GenBudget& b);
ConfP gen_pgv_config(const GenBudget& b);

// A closed, well-typed PCP process with every restriction annotated.
// Priorities step by two.
std::string gen_pcp_source(const GenBudget& b);
pcp::ProcP gen_pcp_process(const GenBudget& b);

// Greedily lowers depth and sessions while `fails` keeps holding, trying
// nearby seeds at each size. Every candidate is a generator output.
GenBudget shrink(const GenBudget& failing, const std::function<bool(const GenBudget&)>& fails, int seeds = 8);

// ---------------------------------------------------------------- annotations

std::vector<std::string> holes_of(const Program& p);
Program fill_holes(const Program& p, const std::map<std::string, int>& values);

struct AnnotationResult {
  bool sat = false;
  std::map<std::string, int> assignment;  // least satisfying assignment
  std::vector<std::string> witness;       // two contradicting constraints, e.g. "o < o'" and "o' < o"
  std::size_t tried = 0;
};

// Tries every assignment of {0..k} to the holes in lexicographic order of
// (holes in order of first appearance).
AnnotationResult find_annotations(const Program& skeleton, int k);
AnnotationResult find_annotations(const std::string& skeleton_source, int k);

// Throws TypeError when the filled program does not check.
void check_program(const Program& p);

}  // namespace pgv::testkit
