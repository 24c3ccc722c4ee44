#include "scsl/ltl_eval.hpp"

#include <vector>

namespace scsl {

namespace {

// subformulas indexed once per call; truth is memoized in a flat
// (subformula x position) table
struct Evaluator {
  const LtlTraceView& trace;
  int c;
  std::vector<const LtlFormula*> nodes;
  std::vector<int> index_of_node;  // parallel via pointer search (small formulas)
  std::vector<signed char> memo;   // -1 unknown, 0 false, 1 true
  std::size_t len;

  int index_formula(const LtlPtr& f) {
    int existing = find(f.get());
    if (existing >= 0) return existing;
    nodes.push_back(f.get());
    int id = static_cast<int>(nodes.size() - 1);
    if (f->lhs) index_formula(f->lhs);
    if (f->rhs) index_formula(f->rhs);
    return id;
  }

  int find(const LtlFormula* f) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i] == f) return static_cast<int>(i);
    return -1;
  }

  bool holds(const LtlFormula* f, std::size_t i) {
    int id = find(f);
    signed char& slot = memo[static_cast<std::size_t>(id) * (len + 1) + i];
    if (slot >= 0) return slot != 0;
    bool v = compute(f, i);
    slot = v ? 1 : 0;
    return v;
  }

  bool compute(const LtlFormula* f, std::size_t i) {
    const std::size_t k = len;
    switch (f->kind) {
      case LtlKind::Atom:
        if (f->atom && f->atom->kind == ExprKind::BoolLit) return f->atom->bool_val;
        return trace.atom_holds(f->atom, i);
      case LtlKind::Not:
        return !holds(f->lhs.get(), i);
      case LtlKind::And:
        return holds(f->lhs.get(), i) && holds(f->rhs.get(), i);
      case LtlKind::Or:
        return holds(f->lhs.get(), i) || holds(f->rhs.get(), i);
      case LtlKind::Implies:
        return !holds(f->lhs.get(), i) || holds(f->rhs.get(), i);
      case LtlKind::Iff:
        return holds(f->lhs.get(), i) == holds(f->rhs.get(), i);
      case LtlKind::Next: {
        // window {i+1, ..., min(k, i + 2c - 1)}
        std::size_t hi = std::min(k, i + 2 * static_cast<std::size_t>(c) - 1);
        for (std::size_t l = i + 1; l <= hi; ++l)
          if (holds(f->lhs.get(), l)) return true;
        return false;
      }
      case LtlKind::Until: {
        // exists j in {i..k} with rhs at j and lhs on {i..j-1}
        for (std::size_t j = i; j <= k; ++j) {
          if (holds(f->rhs.get(), j)) {
            bool prefix = true;
            for (std::size_t l = i; l < j; ++l)
              if (!holds(f->lhs.get(), l)) {
                prefix = false;
                break;
              }
            if (prefix) return true;
          }
        }
        return false;
      }
      case LtlKind::Finally: {
        for (std::size_t j = i; j <= k; ++j)
          if (holds(f->lhs.get(), j)) return true;
        return false;
      }
      case LtlKind::Globally: {
        for (std::size_t j = i; j <= k; ++j)
          if (!holds(f->lhs.get(), j)) return false;
        return true;
      }
    }
    return false;
  }
};

} // namespace

bool eval_finite(const LtlPtr& phi, const LtlTraceView& trace, std::size_t pos, int cycle_bound) {
  if (trace.length() == 0 || pos < 1 || pos > trace.length())
    throw std::out_of_range("eval_finite: position out of range");
  Evaluator ev{trace, cycle_bound < 1 ? 1 : cycle_bound, {}, {}, {}, trace.length()};
  ev.index_formula(phi);
  ev.memo.assign(ev.nodes.size() * (ev.len + 1), -1);
  return ev.holds(phi.get(), pos);
}

bool eval_finite(const LtlPtr& phi, const LtlTraceView& trace, int cycle_bound) {
  return eval_finite(phi, trace, 1, cycle_bound);
}

} // namespace scsl
