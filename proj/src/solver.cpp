#include "scsl/solver.hpp"

#include <algorithm>
#include <functional>

namespace scsl {

namespace {

// conjunction flattening
void flatten_conj(const ExprPtr& e, std::vector<ExprPtr>& lits) {
  if (e && e->kind == ExprKind::Binary && e->bin_op == BinOp::And) {
    flatten_conj(e->args[0], lits);
    flatten_conj(e->args[1], lits);
    return;
  }
  if (e) lits.push_back(e);
}

std::string path_key(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Ident: return e->str_val;
    case ExprKind::Field: return path_key(e->base) + "." + e->str_val;
    case ExprKind::Index:
      if (e->args[0]->kind == ExprKind::IntLit)
        return path_key(e->base) + "[" + std::to_string(e->args[0]->int_val) + "]";
      return "";
    default: return "";
  }
}

struct Search {
  const SolverProblem& prob;
  std::vector<ExprPtr> literals;
  std::map<std::string, Value> assignment;  // targets assigned so far
  std::int64_t nodes = 0;

  bool is_target(const std::string& key) const {
    for (const auto& [s, t] : prob.symbols)
      if (s == key) return true;
    return false;
  }

  // evaluation environment: fixed + assignment as locals, targets as symbols
  bool try_eval(const ExprPtr& e, Value& out) const {
    std::map<std::string, Value> locals = prob.fixed;
    for (const auto& [k, v] : assignment) locals[k] = v;
    EvalContext ctx;
    ctx.consts = prob.consts;
    ctx.locals = &locals;
    ctx.spec = prob.spec;
    try {
      out = eval_expr(e, ctx);
      return true;
    } catch (const RuntimeError&) {
      return false;
    }
  }

  // one propagation sweep: literal `sym = expr` (or reversed) with an
  // evaluable other side binds sym
  bool propagate() {
    bool changed = false;
    for (const auto& lit : literals) {
      if (!(lit->kind == ExprKind::Binary && lit->bin_op == BinOp::Eq)) continue;
      for (int side = 0; side < 2; ++side) {
        const ExprPtr& l = lit->args[static_cast<std::size_t>(side)];
        const ExprPtr& r = lit->args[static_cast<std::size_t>(1 - side)];
        std::string key = path_key(l);
        if (key.empty() || !is_target(key) || assignment.count(key)) continue;
        Value v;
        if (try_eval(r, v)) {
          assignment[key] = v;
          changed = true;
        }
      }
    }
    return changed;
  }

  bool check_all_decided() const {
    // every literal must evaluate true under the current full assignment
    for (const auto& lit : literals) {
      Value v;
      if (!try_eval(lit, v)) return false;
      if (v.kind() != ValueKind::Bool || !v.as_bool()) return false;
    }
    return true;
  }

  // candidate values for an unassigned symbol, by type
  std::vector<Value> candidates(const std::string& key, const TypePtr& t) {
    std::vector<Value> out;
    if (!t) throw UnsupportedTerm(key);
    switch (t->kind) {
      case TypeKind::Bool:
        out.push_back(Value::boolean(false));
        out.push_back(Value::boolean(true));
        return out;
      case TypeKind::EnumRef: {
        const EnumDecl* e = prob.spec ? prob.spec->find_enum(t->name) : nullptr;
        if (!e) throw UnsupportedTerm(key);
        for (std::size_t i = 0; i < e->literals.size(); ++i)
          out.push_back(Value::enum_lit(e->name, static_cast<int>(i), e->literals[i]));
        return out;
      }
      case TypeKind::Int:
      case TypeKind::Nat: {
        std::int64_t lo = t->kind == TypeKind::Nat ? 0 : prob.int_min;
        std::int64_t hi = prob.int_max;
        tighten_int_bounds(key, lo, hi);
        for (std::int64_t v = lo; v <= hi; ++v) out.push_back(Value::integer(v));
        return out;
      }
      case TypeKind::Real: {
        // interval-derived witnesses with rational midpoints
        double lo = static_cast<double>(prob.int_min), hi = static_cast<double>(prob.int_max);
        bool lo_strict = false, hi_strict = false;
        tighten_real_bounds(key, lo, hi, lo_strict, hi_strict);
        if (lo > hi) return out;
        double mid = (lo + hi) / 2.0;
        if (!lo_strict) out.push_back(Value::real(lo));
        out.push_back(Value::real(mid));
        if (!hi_strict) out.push_back(Value::real(hi));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end(),
                              [](const Value& a, const Value& b) { return a.compare(b) == 0; }),
                  out.end());
        return out;
      }
      case TypeKind::Token: {
        // tokens can only be matched against literal comparisons
        collect_token_candidates(key, out);
        if (out.empty()) out.push_back(Value::token(""));
        return out;
      }
      default:
        throw UnsupportedTerm(key + " : " + type_str(t));
    }
  }

  void tighten_int_bounds(const std::string& key, std::int64_t& lo, std::int64_t& hi) {
    for (const auto& lit : literals) {
      if (lit->kind != ExprKind::Binary) continue;
      for (int side = 0; side < 2; ++side) {
        if (path_key(lit->args[static_cast<std::size_t>(side)]) != key) continue;
        Value bound;
        if (!try_eval(lit->args[static_cast<std::size_t>(1 - side)], bound)) continue;
        if (bound.kind() != ValueKind::Int) continue;
        std::int64_t b = bound.as_int();
        BinOp op = lit->bin_op;
        if (side == 1) {  // bound OP key
          if (op == BinOp::Lt) op = BinOp::Gt;
          else if (op == BinOp::Le) op = BinOp::Ge;
          else if (op == BinOp::Gt) op = BinOp::Lt;
          else if (op == BinOp::Ge) op = BinOp::Le;
        }
        switch (op) {
          case BinOp::Eq: lo = std::max(lo, b); hi = std::min(hi, b); break;
          case BinOp::Lt: hi = std::min(hi, b - 1); break;
          case BinOp::Le: hi = std::min(hi, b); break;
          case BinOp::Gt: lo = std::max(lo, b + 1); break;
          case BinOp::Ge: lo = std::max(lo, b); break;
          default: break;
        }
      }
    }
  }

  void tighten_real_bounds(const std::string& key, double& lo, double& hi, bool& lo_strict,
                           bool& hi_strict) {
    for (const auto& lit : literals) {
      if (lit->kind != ExprKind::Binary) continue;
      for (int side = 0; side < 2; ++side) {
        if (path_key(lit->args[static_cast<std::size_t>(side)]) != key) continue;
        Value bound;
        if (!try_eval(lit->args[static_cast<std::size_t>(1 - side)], bound)) continue;
        if (bound.kind() != ValueKind::Int && bound.kind() != ValueKind::Real) continue;
        double b = bound.as_real();
        BinOp op = lit->bin_op;
        if (side == 1) {
          if (op == BinOp::Lt) op = BinOp::Gt;
          else if (op == BinOp::Le) op = BinOp::Ge;
          else if (op == BinOp::Gt) op = BinOp::Lt;
          else if (op == BinOp::Ge) op = BinOp::Le;
        }
        switch (op) {
          case BinOp::Eq: lo = std::max(lo, b); hi = std::min(hi, b); break;
          case BinOp::Lt:
            if (b < hi || (b == hi && !hi_strict)) { hi = b; hi_strict = true; }
            break;
          case BinOp::Le: hi = std::min(hi, b); break;
          case BinOp::Gt:
            if (b > lo || (b == lo && !lo_strict)) { lo = b; lo_strict = true; }
            break;
          case BinOp::Ge: lo = std::max(lo, b); break;
          default: break;
        }
      }
    }
    if (lo_strict || hi_strict) {
      // strict bounds: nudge the midpoint-only window
      if (lo_strict && hi_strict && lo >= hi) hi = lo;  // empty, caught by caller
    }
  }

  void collect_token_candidates(const std::string& key, std::vector<Value>& out) {
    for (const auto& lit : literals) {
      if (lit->kind != ExprKind::Binary) continue;
      if (lit->bin_op != BinOp::Eq && lit->bin_op != BinOp::In) continue;
      for (int side = 0; side < 2; ++side) {
        if (path_key(lit->args[static_cast<std::size_t>(side)]) != key) continue;
        Value v;
        if (try_eval(lit->args[static_cast<std::size_t>(1 - side)], v)) {
          if (v.kind() == ValueKind::Token) out.push_back(v);
          if (v.kind() == ValueKind::List || v.kind() == ValueKind::Set)
            for (const auto& e : v.elements())
              if (e.kind() == ValueKind::Token) out.push_back(e);
        }
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](const Value& a, const Value& b) { return a.compare(b) == 0; }),
              out.end());
  }

  bool search(std::size_t index) {
    if (++nodes > prob.max_nodes) return false;
    while (propagate()) {
    }
    // find the next unassigned symbol at or after index (declaration order)
    while (index < prob.symbols.size() && assignment.count(prob.symbols[index].first)) ++index;
    if (index == prob.symbols.size()) return check_all_decided();
    const auto& [key, type] = prob.symbols[index];
    std::map<std::string, Value> saved = assignment;
    for (const Value& v : candidates(key, type)) {
      assignment[key] = v;
      if (quick_reject()) {
        assignment = saved;
        continue;
      }
      if (search(index + 1)) return true;
      assignment = saved;
    }
    return false;
  }

  // literal that is fully evaluable and false prunes the branch
  bool quick_reject() const {
    for (const auto& lit : literals) {
      Value v;
      if (try_eval(lit, v) && v.kind() == ValueKind::Bool && !v.as_bool()) return true;
    }
    return false;
  }
};

} // namespace

std::optional<std::map<std::string, Value>> solve_guard(const ExprPtr& guard,
                                                        const SolverProblem& problem) {
  Search s{problem, {}, {}, 0};
  flatten_conj(guard, s.literals);
  if (s.search(0)) {
    // only the problem symbols belong to the witness
    std::map<std::string, Value> out;
    for (const auto& [k, t] : problem.symbols) {
      (void)t;
      auto it = s.assignment.find(k);
      if (it != s.assignment.end()) out[k] = it->second;
    }
    return out;
  }
  return std::nullopt;
}

} // namespace scsl
