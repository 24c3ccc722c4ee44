#pragma once

// Post-hoc verification of the semantic laws on engine-produced traces:
// interface propagation, output constancy within object cycles, EoT
// placement, and frame soundness of parameter writes.

#include <string>
#include <vector>

#include "scsl/valuation.hpp"
#include "scsl/world.hpp"

namespace scsl {

struct TraceLawReport {
  std::size_t interface_pairs_checked = 0;
  std::size_t interface_violations = 0;
  std::size_t constancy_checks = 0;
  std::size_t constancy_violations = 0;
  bool eot_only_at_end = true;
  std::size_t writes_checked = 0;
  std::size_t unattributed_writes = 0;
  std::vector<std::string> violations;  // human-readable details

  bool ok() const {
    return interface_violations == 0 && constancy_violations == 0 && eot_only_at_end &&
           unattributed_writes == 0;
  }
};

TraceLawReport check_trace_laws(const Specification& spec,
                                const std::map<std::string, Value>& consts,
                                const RunResult& result);

} // namespace scsl
