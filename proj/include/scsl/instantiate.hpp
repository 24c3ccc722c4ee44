#pragma once

// Expansion of the system test schedule into concrete scenario instances:
// replication unrolling, actual-parameter binding, display naming, and
// sequential-composition predecessor links.

#include <map>
#include <string>
#include <vector>

#include "scsl/ast.hpp"
#include "scsl/value.hpp"

namespace scsl {

struct InstanceSpec {
  std::string name;                 // display name, e.g. Approach3 or gpsGlitch
  const ScenarioTypeDecl* decl = nullptr;
  // formal object parameter -> flat symbol path ("r[2]", "cc", "r")
  std::map<std::string, std::string> object_bindings;
  // formals bound to the collaboration itself
  std::vector<std::string> collab_params;
  std::map<std::string, Value> scalar_params;
  int predecessor = -1;  // index of the sequential predecessor, -1 if none
};

// Unrolls the schedule tree (plus standalone instance declarations) into an
// ordered instance list. Replication ranges are evaluated against the bound
// constants.
std::vector<InstanceSpec> instantiate_schedule(const Specification& spec,
                                               const std::map<std::string, Value>& consts,
                                               Diagnostics& diags);

// Maximal cycletime over the object types referenced by the formula's atoms
// (1 when only scenario-local symbols occur); a scenario-level cyclebound
// override wins.
int compute_cycle_bound(const Specification& spec, const InstanceSpec& inst, const LtlPtr& phi);

// Conjunction of scalar parameter bindings (p = value) for guard
// incorporation; null when the instance has no scalar parameters.
ExprPtr instance_constraint(const InstanceSpec& inst);

// Value -> literal expression (for constraints and rendering).
ExprPtr value_to_expr(const Value& v);

} // namespace scsl
