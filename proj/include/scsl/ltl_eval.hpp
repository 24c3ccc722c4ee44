#pragma once

// Reference finite-trace LTL evaluation with the cycle-time-widened Next.
// This is the brute-force semantics oracle; the online monitor and the
// symbolic automaton are cross-checked against it.

#include <functional>

#include "scsl/ast.hpp"

namespace scsl {

// Read-only view of a finite trace for formula evaluation. Positions are
// 1-based following the semantics rules.
class LtlTraceView {
 public:
  virtual ~LtlTraceView() = default;
  virtual std::size_t length() const = 0;
  virtual bool atom_holds(const ExprPtr& atom, std::size_t pos) const = 0;
};

// Truth of phi at position pos (1-based) of a non-empty finite trace.
// The Next operator is satisfied anywhere in the window
// {pos+1, ..., min(length, pos + 2c - 1)}.
bool eval_finite(const LtlPtr& phi, const LtlTraceView& trace, std::size_t pos, int cycle_bound);

// Whole-trace satisfaction: truth at the first index.
bool eval_finite(const LtlPtr& phi, const LtlTraceView& trace, int cycle_bound);

} // namespace scsl
