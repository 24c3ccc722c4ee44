#pragma once

// Test-suite generation: scheduling-graph path enumeration, depth-first
// exploration of the per-instance symbolic automata with guarded-command
// condition/action state, guard solving to concrete stimuli, and the JSON
// suite format.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scsl/ast.hpp"
#include "scsl/instantiate.hpp"
#include "scsl/value.hpp"
#include "scsl/vendor_json.hpp"

namespace scsl {

struct TestStep {
  std::string transition;                  // e.g. "s0 -> accept"
  std::string guard;                       // symbolic guard text
  std::map<std::string, Value> stimulation;
  std::string expected_condition;          // empty per the suite format
};

struct TestCase {
  std::string name;
  std::vector<TestStep> steps;
};

struct TestSuite {
  std::string name;
  std::string spec_hash;
  std::uint64_t seed = 0;
  std::vector<TestCase> cases;
  std::vector<std::string> reports;  // UNSAT / budget notes
  bool complete = true;
};

struct GenBudget {
  int max_depth = 12;          // automaton DFS depth per instance
  int max_cases_per_path = 8;
  int max_paths = 256;
  std::int64_t solver_nodes = 200000;
};

TestSuite generate(const Specification& spec, const std::map<std::string, Value>& consts,
                   std::uint64_t seed, const GenBudget& budget, Diagnostics& diags);

std::string serialize_suite(const TestSuite& suite);
TestSuite load_suite(const std::string& text);  // accepts a bare case object too

nlohmann::ordered_json case_to_json(const TestCase& c);
TestCase case_from_json(const nlohmann::ordered_json& j);

bool suite_equal(const TestSuite& a, const TestSuite& b);

} // namespace scsl
