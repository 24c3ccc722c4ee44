#pragma once

// Online three-valued monitor by formula progression. A source formula is
// compiled into a negation-normal runtime algebra with the widened Next
// expanded into bounded window operators; progression rewrites the residual
// obligation one valuation at a time. Finalizing at any point agrees exactly
// with eval_finite on the consumed prefix.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "scsl/ast.hpp"

namespace scsl {

enum class VerdictKind { Pass, Fail, Inconclusive };

struct Verdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  std::string reason;  // e.g. "Temporal Violation" on undischarged liveness

  bool pass() const { return kind == VerdictKind::Pass; }
  bool fail() const { return kind == VerdictKind::Fail; }
  std::string str() const;
};

// Hash-consed runtime formulas. Node ids are indices into a growing table;
// ids 0/1 are the constants false/true.
class FormulaStore {
 public:
  enum class Op : std::uint8_t {
    False, True,
    Lit,       // atom literal; a = atom id, w = 1 positive / 0 negated
    And, Or,   // a, b children
    SNext,     // strong: a next position exists and child holds there
    WNext,     // weak: no next position, or child holds there
    Until,     // a U b, finite semantics
    Release,   // dual of Until; Globally is (false R phi)
    EvWithin,  // exists d in {0..w-1}: child holds d steps ahead (within trace)
    AllWithin, // forall d in {0..w-1} with position in trace: child holds
  };

  struct Node {
    Op op;
    std::int32_t a = -1;
    std::int32_t b = -1;
    std::int32_t w = 0;  // window size / literal polarity
  };

  FormulaStore();

  std::int32_t ff() const { return 0; }
  std::int32_t tt() const { return 1; }
  std::int32_t lit(std::int32_t atom_id, bool positive);
  std::int32_t conj(std::int32_t a, std::int32_t b);
  std::int32_t disj(std::int32_t a, std::int32_t b);
  std::int32_t snext(std::int32_t a);
  std::int32_t wnext(std::int32_t a);
  std::int32_t until(std::int32_t a, std::int32_t b);
  std::int32_t release(std::int32_t a, std::int32_t b);
  std::int32_t ev_within(std::int32_t w, std::int32_t a);
  std::int32_t all_within(std::int32_t w, std::int32_t a);
  std::int32_t negate(std::int32_t a);

  // Compiles a source formula. Atom expressions are interned into `atoms`
  // (structural equality); their index is the atom id used by Lit nodes.
  std::int32_t compile(const LtlPtr& phi, int cycle_bound, std::vector<ExprPtr>& atoms);

  // One progression step: consume a valuation given as per-atom truth.
  std::int32_t progress(std::int32_t node, const std::vector<bool>& atom_values);

  // End-of-trace truth of a residual (SNext -> false, WNext -> true).
  bool finalize_true(std::int32_t node) const;

  const Node& node(std::int32_t id) const { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }
  std::string str(std::int32_t node, const std::vector<ExprPtr>& atoms) const;

  // Fast progression tables for exhaustive drivers: next[node][sigma] over an
  // externally managed dense valuation encoding.
  std::int32_t progress_cached(std::int32_t node, std::uint32_t sigma_mask,
                               std::uint32_t atom_count);

 private:
  std::vector<Node> nodes_;
  std::unordered_map<std::uint64_t, std::int32_t> index_;
  // memo for progress_cached: key (node, mask)
  std::unordered_map<std::uint64_t, std::int32_t> prog_memo_;

  std::int32_t intern(Op op, std::int32_t a, std::int32_t b, std::int32_t w);
  std::int32_t eval_at(std::int32_t node, std::uint32_t mask);
  std::int32_t progress_mask(std::int32_t node, std::uint32_t mask);
};

// A monitor instance for one compiled formula.
class Monitor {
 public:
  Monitor(const LtlPtr& phi, int cycle_bound);

  const std::vector<ExprPtr>& atoms() const { return atoms_; }

  // Consume one valuation; atom_values[i] is the truth of atoms()[i].
  Verdict step(const std::vector<bool>& atom_values);

  // Verdict when the segment ends now; never Inconclusive.
  Verdict finalize() const;

  // Latched three-valued verdict after the last step.
  Verdict current() const { return current_; }

  std::string residual_str() const;

 private:
  FormulaStore store_;
  std::vector<ExprPtr> atoms_;
  std::int32_t residual_;
  Verdict current_;
  bool saw_temporal_obligation_ = false;

  Verdict verdict_of_residual(std::int32_t node) const;
};

} // namespace scsl
