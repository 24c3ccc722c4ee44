#include "scsl/monitor.hpp"

#include <functional>
#include <sstream>

namespace scsl {

std::string Verdict::str() const {
  switch (kind) {
    case VerdictKind::Pass: return "PASS";
    case VerdictKind::Fail: return reason.empty() ? "FAIL" : "FAIL: " + reason;
    case VerdictKind::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

FormulaStore::FormulaStore() {
  nodes_.push_back(Node{Op::False, -1, -1, 0});
  nodes_.push_back(Node{Op::True, -1, -1, 0});
}

std::int32_t FormulaStore::intern(Op op, std::int32_t a, std::int32_t b, std::int32_t w) {
  std::uint64_t key = (static_cast<std::uint64_t>(op) << 56) ^
                      (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 28) ^
                      static_cast<std::uint64_t>(static_cast<std::uint32_t>(b)) ^
                      (static_cast<std::uint64_t>(static_cast<std::uint32_t>(w)) << 48);
  auto it = index_.find(key);
  if (it != index_.end()) {
    const Node& n = nodes_[it->second];
    if (n.op == op && n.a == a && n.b == b && n.w == w) return it->second;
    // rare collision: linear fallback
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].op == op && nodes_[i].a == a && nodes_[i].b == b && nodes_[i].w == w)
        return static_cast<std::int32_t>(i);
  }
  nodes_.push_back(Node{op, a, b, w});
  std::int32_t id = static_cast<std::int32_t>(nodes_.size() - 1);
  index_.emplace(key, id);
  return id;
}

std::int32_t FormulaStore::lit(std::int32_t atom_id, bool positive) {
  return intern(Op::Lit, atom_id, -1, positive ? 1 : 0);
}

std::int32_t FormulaStore::conj(std::int32_t a, std::int32_t b) {
  if (a == ff() || b == ff()) return ff();
  if (a == tt()) return b;
  if (b == tt()) return a;
  if (a == b) return a;
  if (a > b) std::swap(a, b);
  return intern(Op::And, a, b, 0);
}

std::int32_t FormulaStore::disj(std::int32_t a, std::int32_t b) {
  if (a == tt() || b == tt()) return tt();
  if (a == ff()) return b;
  if (b == ff()) return a;
  if (a == b) return a;
  if (a > b) std::swap(a, b);
  return intern(Op::Or, a, b, 0);
}

std::int32_t FormulaStore::snext(std::int32_t a) {
  if (a == ff()) return ff();  // a next position cannot satisfy false
  return intern(Op::SNext, a, -1, 0);
}

std::int32_t FormulaStore::wnext(std::int32_t a) {
  if (a == tt()) return tt();
  return intern(Op::WNext, a, -1, 0);
}

std::int32_t FormulaStore::until(std::int32_t a, std::int32_t b) {
  if (b == tt()) return tt();
  if (b == ff()) return ff();
  return intern(Op::Until, a, b, 0);
}

std::int32_t FormulaStore::release(std::int32_t a, std::int32_t b) {
  if (b == tt()) return tt();
  if (b == ff()) return ff();
  return intern(Op::Release, a, b, 0);
}

std::int32_t FormulaStore::ev_within(std::int32_t w, std::int32_t a) {
  if (a == tt()) return tt();
  if (a == ff()) return ff();
  if (w <= 1) return a;
  return intern(Op::EvWithin, a, -1, w);
}

std::int32_t FormulaStore::all_within(std::int32_t w, std::int32_t a) {
  if (a == tt()) return tt();
  if (a == ff()) return ff();
  if (w <= 1) return a;
  return intern(Op::AllWithin, a, -1, w);
}

std::int32_t FormulaStore::negate(std::int32_t id) {
  const Node n = nodes_[id];
  switch (n.op) {
    case Op::False: return tt();
    case Op::True: return ff();
    case Op::Lit: return lit(n.a, n.w == 0);
    case Op::And: return disj(negate(n.a), negate(n.b));
    case Op::Or: return conj(negate(n.a), negate(n.b));
    case Op::SNext: return wnext(negate(n.a));
    case Op::WNext: return snext(negate(n.a));
    case Op::Until: return release(negate(n.a), negate(n.b));
    case Op::Release: return until(negate(n.a), negate(n.b));
    case Op::EvWithin: return all_within(n.w, negate(n.a));
    case Op::AllWithin: return ev_within(n.w, negate(n.a));
  }
  return ff();
}

namespace {

std::int32_t intern_atom(const ExprPtr& e, std::vector<ExprPtr>& atoms) {
  for (std::size_t i = 0; i < atoms.size(); ++i)
    if (expr_equal(atoms[i], e)) return static_cast<std::int32_t>(i);
  atoms.push_back(e);
  return static_cast<std::int32_t>(atoms.size() - 1);
}

} // namespace

std::int32_t FormulaStore::compile(const LtlPtr& phi, int cycle_bound,
                                   std::vector<ExprPtr>& atoms) {
  const int c = cycle_bound < 1 ? 1 : cycle_bound;
  const std::int32_t window = 2 * c - 1;
  std::function<std::int32_t(const LtlPtr&)> go = [&](const LtlPtr& f) -> std::int32_t {
    switch (f->kind) {
      case LtlKind::Atom: {
        if (f->atom && f->atom->kind == ExprKind::BoolLit)
          return f->atom->bool_val ? tt() : ff();
        return lit(intern_atom(f->atom, atoms), true);
      }
      case LtlKind::Not: return negate(go(f->lhs));
      case LtlKind::And: {
        // sequence subformula compilation left-to-right so node and atom ids
        // follow the source order (transition enumeration depends on it)
        std::int32_t a = go(f->lhs);
        std::int32_t b = go(f->rhs);
        return conj(a, b);
      }
      case LtlKind::Or: {
        std::int32_t a = go(f->lhs);
        std::int32_t b = go(f->rhs);
        return disj(a, b);
      }
      case LtlKind::Implies: {
        std::int32_t a = go(f->lhs);
        std::int32_t b = go(f->rhs);
        return disj(negate(a), b);
      }
      case LtlKind::Iff: {
        std::int32_t a = go(f->lhs);
        std::int32_t b = go(f->rhs);
        return conj(disj(negate(a), b), disj(negate(b), a));
      }
      case LtlKind::Next: return snext(ev_within(window, go(f->lhs)));
      case LtlKind::Until: {
        std::int32_t a = go(f->lhs);
        std::int32_t b = go(f->rhs);
        return until(a, b);
      }
      case LtlKind::Finally: return until(tt(), go(f->lhs));
      case LtlKind::Globally: return release(ff(), go(f->lhs));
    }
    return ff();
  };
  return go(phi);
}

// Residuals after consuming a prefix are boolean combinations of SNext/WNext
// wrappers: obligations about positions beyond the consumed prefix. Stepping
// unwraps the root wrappers (their position is the one being consumed) and
// evaluates the wrapped formulas there; wrappers encountered *inside* that
// evaluation are fresh obligations for the following position and stay
// deferred.
std::int32_t FormulaStore::eval_at(std::int32_t id, std::uint32_t mask) {
  const Node n = nodes_[id];
  switch (n.op) {
    case Op::False:
    case Op::True:
      return id;
    case Op::Lit: {
      bool v = (mask >> n.a) & 1u;
      return (v == (n.w == 1)) ? tt() : ff();
    }
    case Op::And: return conj(eval_at(n.a, mask), eval_at(n.b, mask));
    case Op::Or: return disj(eval_at(n.a, mask), eval_at(n.b, mask));
    case Op::SNext:
    case Op::WNext:
      return id;  // deferred: an obligation for the following position
    case Op::Until: {
      std::int32_t now = eval_at(n.b, mask);
      std::int32_t keep = conj(eval_at(n.a, mask), snext(id));
      return disj(now, keep);
    }
    case Op::Release: {
      std::int32_t now = eval_at(n.b, mask);
      std::int32_t stop = disj(eval_at(n.a, mask), wnext(id));
      return conj(now, stop);
    }
    case Op::EvWithin: {
      std::int32_t now = eval_at(n.a, mask);
      std::int32_t later = n.w > 1 ? snext(ev_within(n.w - 1, n.a)) : ff();
      return disj(now, later);
    }
    case Op::AllWithin: {
      std::int32_t now = eval_at(n.a, mask);
      std::int32_t later = n.w > 1 ? wnext(all_within(n.w - 1, n.a)) : tt();
      return conj(now, later);
    }
  }
  return ff();
}

std::int32_t FormulaStore::progress_mask(std::int32_t id, std::uint32_t mask) {
  const Node n = nodes_[id];
  switch (n.op) {
    case Op::False:
    case Op::True:
      return id;
    case Op::And: return conj(progress_mask(n.a, mask), progress_mask(n.b, mask));
    case Op::Or: return disj(progress_mask(n.a, mask), progress_mask(n.b, mask));
    case Op::SNext:
    case Op::WNext:
      // the wrapped obligation's position is the one being consumed now
      return eval_at(n.a, mask);
    default:
      // a residual is always wrapper-rooted; anything else is a programming
      // error upstream
      return eval_at(id, mask);
  }
}

std::int32_t FormulaStore::progress(std::int32_t id, const std::vector<bool>& atom_values) {
  std::uint32_t mask = 0;
  for (std::size_t i = 0; i < atom_values.size() && i < 32; ++i)
    if (atom_values[i]) mask |= 1u << i;
  return progress_mask(id, mask);
}

std::int32_t FormulaStore::progress_cached(std::int32_t node, std::uint32_t sigma_mask,
                                           std::uint32_t atom_count) {
  std::uint64_t key = (static_cast<std::uint64_t>(node) << 8) | sigma_mask;
  (void)atom_count;
  auto it = prog_memo_.find(key);
  if (it != prog_memo_.end()) return it->second;
  std::int32_t out = progress_mask(node, sigma_mask);
  prog_memo_.emplace(key, out);
  return out;
}

bool FormulaStore::finalize_true(std::int32_t id) const {
  const Node& n = nodes_[id];
  switch (n.op) {
    case Op::False: return false;
    case Op::True: return true;
    case Op::And: return finalize_true(n.a) && finalize_true(n.b);
    case Op::Or: return finalize_true(n.a) || finalize_true(n.b);
    case Op::SNext: return false;  // the required next position does not exist
    case Op::WNext: return true;
    // pre-progression roots: end-of-trace truth of the source operator
    case Op::Lit: return false;
    case Op::Until: return false;
    case Op::Release: return true;
    case Op::EvWithin: return false;
    case Op::AllWithin: return true;
  }
  return false;
}

std::string FormulaStore::str(std::int32_t id, const std::vector<ExprPtr>& atoms) const {
  const Node& n = nodes_[id];
  std::ostringstream os;
  auto sub = [&](std::int32_t x) { return str(x, atoms); };
  switch (n.op) {
    case Op::False: return "false";
    case Op::True: return "true";
    case Op::Lit: {
      std::string a = n.a >= 0 && n.a < static_cast<std::int32_t>(atoms.size())
                          ? expr_str(atoms[n.a])
                          : "p" + std::to_string(n.a);
      return n.w == 1 ? a : "!(" + a + ")";
    }
    case Op::And: os << "(" << sub(n.a) << " && " << sub(n.b) << ")"; break;
    case Op::Or: os << "(" << sub(n.a) << " || " << sub(n.b) << ")"; break;
    case Op::SNext: os << "X[s] " << sub(n.a); break;
    case Op::WNext: os << "X[w] " << sub(n.a); break;
    case Op::Until: os << "(" << sub(n.a) << " U " << sub(n.b) << ")"; break;
    case Op::Release: os << "(" << sub(n.a) << " R " << sub(n.b) << ")"; break;
    case Op::EvWithin: os << "EW<" << n.w << "> " << sub(n.a); break;
    case Op::AllWithin: os << "AW<" << n.w << "> " << sub(n.a); break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Monitor

Monitor::Monitor(const LtlPtr& phi, int cycle_bound) {
  std::int32_t compiled = store_.compile(phi, cycle_bound, atoms_);
  // the initial residual defers the whole formula to the first consumed
  // valuation
  residual_ = store_.snext(compiled);
  current_ = verdict_of_residual(residual_);
}

Verdict Monitor::verdict_of_residual(std::int32_t node) const {
  if (node == store_.tt()) return Verdict{VerdictKind::Pass, ""};
  if (node == store_.ff()) {
    Verdict v;
    v.kind = VerdictKind::Fail;
    v.reason = saw_temporal_obligation_ ? "Temporal Violation" : "Safety Violation";
    return v;
  }
  return Verdict{VerdictKind::Inconclusive, ""};
}

Verdict Monitor::step(const std::vector<bool>& atom_values) {
  if (current_.kind != VerdictKind::Inconclusive) return current_;  // latched
  // remember whether a liveness-style obligation was pending: its collapse
  // (or end-of-trace) is a temporal violation rather than a safety one
  std::function<bool(std::int32_t)> pending = [&](std::int32_t id) -> bool {
    const auto& n = store_.node(id);
    switch (n.op) {
      case FormulaStore::Op::Until:
      case FormulaStore::Op::EvWithin: return true;
      case FormulaStore::Op::And:
      case FormulaStore::Op::Or: return pending(n.a) || pending(n.b);
      case FormulaStore::Op::SNext:
      case FormulaStore::Op::WNext:
      case FormulaStore::Op::Release: return n.a >= 0 && pending(n.a);
      default: return false;
    }
  };
  saw_temporal_obligation_ = pending(residual_);
  residual_ = store_.progress(residual_, atom_values);
  current_ = verdict_of_residual(residual_);
  return current_;
}

Verdict Monitor::finalize() const {
  if (current_.kind != VerdictKind::Inconclusive) return current_;
  if (store_.finalize_true(residual_)) return Verdict{VerdictKind::Pass, ""};
  Verdict v;
  v.kind = VerdictKind::Fail;
  v.reason = "Temporal Violation";  // undischarged obligation at end of activity
  return v;
}

std::string Monitor::residual_str() const { return store_.str(residual_, atoms_); }

} // namespace scsl
