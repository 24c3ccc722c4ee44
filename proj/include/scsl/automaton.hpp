#pragma once

// Symbolic finite automaton construction from LTL formulas by tableau
// expansion over the runtime formula algebra, with quantifier-free guard
// expressions recovered through the atom abstraction map. Runtime evaluation
// keeps a nondeterministic set of active states.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scsl/ast.hpp"
#include "scsl/eval.hpp"
#include "scsl/monitor.hpp"
#include "scsl/vendor_json.hpp"

namespace scsl {

// Invertible mapping between atom expressions and proposition names p0, p1, ...
class AbstractionMap {
 public:
  // interning: structurally identical expressions share a proposition
  int intern(const ExprPtr& atom);
  std::optional<int> find(const ExprPtr& atom) const;
  const ExprPtr& atom(int id) const { return atoms_.at(static_cast<std::size_t>(id)); }
  std::string prop_name(int id) const { return "p" + std::to_string(id); }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<ExprPtr>& atoms() const { return atoms_; }

 private:
  std::vector<ExprPtr> atoms_;
};

// phi_scsl = precondition && X(/\ specs); without a precondition the
// conjunction of specs stands alone.
LtlPtr build_phi_scsl(const ScenarioTypeDecl& scenario);

// Propositional abstraction of a formula: every atom becomes a proposition.
// Returns the same formula shape with atoms replaced by proposition idents
// plus the invertible map.
std::pair<LtlPtr, AbstractionMap> abstract_formula(const LtlPtr& phi);
LtlPtr unabstract_formula(const LtlPtr& phi, const AbstractionMap& map);

// A guard literal: an atom (by id) or its negation.
struct GuardLit {
  int atom = 0;
  bool positive = true;
  bool operator<(const GuardLit& o) const {
    return atom != o.atom ? atom < o.atom : positive < o.positive;
  }
  bool operator==(const GuardLit& o) const { return atom == o.atom && positive == o.positive; }
};

struct SymbolicTransition {
  int src = 0;
  int dst = 0;
  std::vector<GuardLit> guard;  // conjunction; empty = true
  ExprPtr guard_expr;           // un-abstracted, instance constraint conjoined
};

class SymbolicAutomaton {
 public:
  int initial_state() const { return 0; }
  int state_count() const { return static_cast<int>(accepting_.size()); }
  bool accepting(int s) const { return accepting_.at(static_cast<std::size_t>(s)); }
  const std::vector<SymbolicTransition>& transitions() const { return transitions_; }
  const std::vector<SymbolicTransition>& transitions_from(int s) const;
  const AbstractionMap& abstraction() const { return abstraction_; }
  const std::string& state_label(int s) const { return labels_.at(static_cast<std::size_t>(s)); }

  nlohmann::ordered_json to_json() const;

  friend class AutomatonBuilder;

 private:
  std::vector<bool> accepting_;
  std::vector<std::string> labels_;
  std::vector<SymbolicTransition> transitions_;
  std::vector<std::vector<SymbolicTransition>> by_src_;
  AbstractionMap abstraction_;
};

struct AutomatonBuildOptions {
  int cycle_bound = 1;
  ExprPtr instance_constraint;      // conjoined into every guard
  std::size_t max_states = 4096;    // construction budget
};

// Builds the automaton accepting exactly the finite traces on which
// eval_finite(phi, trace, 1, cycle_bound) holds.
SymbolicAutomaton build_automaton(const LtlPtr& phi, const AutomatonBuildOptions& opts = {});

// Nondeterministic active-state set.
struct StateSet {
  std::set<int> states;
  bool empty() const { return states.empty(); }
};

StateSet initial_state_set(const SymbolicAutomaton& aut);

// Successors of all states whose guards hold under the valuation; atom truth
// is established once per atom via eval_expr over ctx.
StateSet step_state_set(const SymbolicAutomaton& aut, const StateSet& states, EvalContext& ctx);

// Same, with pre-evaluated atom truth (atom id -> value).
StateSet step_state_set(const SymbolicAutomaton& aut, const StateSet& states,
                        const std::vector<bool>& atom_values);

// Acceptance at end of trace: some active state is accepting.
bool state_set_accepting(const SymbolicAutomaton& aut, const StateSet& states);

} // namespace scsl
