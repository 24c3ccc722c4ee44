#pragma once

// Layered quantifier-free guard solving: equality propagation first, then
// bounded enumeration over enum/bool/integer domains with full witness
// re-checking, and interval-derived witnesses for reals. Deterministic:
// symbols are assigned in declaration order, candidate values ascending.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scsl/ast.hpp"
#include "scsl/eval.hpp"

namespace scsl {

struct SolverProblem {
  const Specification* spec = nullptr;
  const std::map<std::string, Value>* consts = nullptr;
  // symbols to solve for, in declaration order, with their types
  std::vector<std::pair<std::string, TypePtr>> symbols;
  // observed/pre-bound symbols
  std::map<std::string, Value> fixed;
  std::int64_t int_min = -1024;
  std::int64_t int_max = 1024;
  std::int64_t max_nodes = 1000000;
};

struct UnsupportedTerm : std::runtime_error {
  explicit UnsupportedTerm(const std::string& term)
      : std::runtime_error("unsupported theory term: " + term) {}
};

// Satisfying assignment of the problem symbols, or nullopt if UNSAT within
// the domains/budget. Throws UnsupportedTerm when a needed symbol cannot be
// enumerated or propagated.
std::optional<std::map<std::string, Value>> solve_guard(const ExprPtr& guard,
                                                        const SolverProblem& problem);

} // namespace scsl
