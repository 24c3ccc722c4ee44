#include "scsl/automaton.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace scsl {

int AbstractionMap::intern(const ExprPtr& atom) {
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (expr_equal(atoms_[i], atom)) return static_cast<int>(i);
  atoms_.push_back(atom);
  return static_cast<int>(atoms_.size() - 1);
}

std::optional<int> AbstractionMap::find(const ExprPtr& atom) const {
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (expr_equal(atoms_[i], atom)) return static_cast<int>(i);
  return std::nullopt;
}

LtlPtr build_phi_scsl(const ScenarioTypeDecl& scenario) {
  LtlPtr spec_conj;
  for (const auto& s : scenario.specs)
    spec_conj = spec_conj ? LtlFormula::make_and(spec_conj, s) : s;
  if (!spec_conj) spec_conj = LtlFormula::make_atom(Expr::make_bool(true));
  if (!scenario.precondition) return spec_conj;
  LtlPtr pre = LtlFormula::make_atom(scenario.precondition);
  return LtlFormula::make_and(pre, LtlFormula::next(spec_conj));
}

std::pair<LtlPtr, AbstractionMap> abstract_formula(const LtlPtr& phi) {
  AbstractionMap map;
  std::function<LtlPtr(const LtlPtr&)> go = [&](const LtlPtr& f) -> LtlPtr {
    if (!f) return f;
    if (f->kind == LtlKind::Atom) {
      if (f->atom && f->atom->kind == ExprKind::BoolLit) return f;  // constants stay
      int id = map.intern(f->atom);
      return LtlFormula::make_atom(Expr::ident(map.prop_name(id)), f->span);
    }
    auto copy = std::make_shared<LtlFormula>(*f);
    copy->lhs = go(f->lhs);
    copy->rhs = go(f->rhs);
    return copy;
  };
  LtlPtr out = go(phi);
  return {out, std::move(map)};
}

LtlPtr unabstract_formula(const LtlPtr& phi, const AbstractionMap& map) {
  std::function<LtlPtr(const LtlPtr&)> go = [&](const LtlPtr& f) -> LtlPtr {
    if (!f) return f;
    if (f->kind == LtlKind::Atom) {
      if (f->atom && f->atom->kind == ExprKind::Ident && f->atom->str_val.size() > 1 &&
          f->atom->str_val[0] == 'p') {
        bool digits = true;
        for (std::size_t i = 1; i < f->atom->str_val.size(); ++i)
          if (!isdigit(static_cast<unsigned char>(f->atom->str_val[i]))) digits = false;
        if (digits) {
          int id = std::stoi(f->atom->str_val.substr(1));
          if (id >= 0 && static_cast<std::size_t>(id) < map.size())
            return LtlFormula::make_atom(map.atom(id), f->span);
        }
      }
      return f;
    }
    auto copy = std::make_shared<LtlFormula>(*f);
    copy->lhs = go(f->lhs);
    copy->rhs = go(f->rhs);
    return copy;
  };
  return go(phi);
}

const std::vector<SymbolicTransition>& SymbolicAutomaton::transitions_from(int s) const {
  return by_src_.at(static_cast<std::size_t>(s));
}

nlohmann::ordered_json SymbolicAutomaton::to_json() const {
  nlohmann::ordered_json j;
  j["states"] = nlohmann::ordered_json::array();
  for (int s = 0; s < state_count(); ++s) {
    nlohmann::ordered_json st;
    st["id"] = s;
    st["label"] = labels_[static_cast<std::size_t>(s)];
    st["accepting"] = accepting_[static_cast<std::size_t>(s)];
    j["states"].push_back(std::move(st));
  }
  j["initial"] = 0;
  j["transitions"] = nlohmann::ordered_json::array();
  for (const auto& t : transitions_) {
    nlohmann::ordered_json tj;
    tj["src"] = t.src;
    tj["dst"] = t.dst;
    tj["guard"] = t.guard_expr ? expr_str(t.guard_expr) : "true";
    j["transitions"].push_back(std::move(tj));
  }
  j["propositions"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < abstraction_.size(); ++i) {
    nlohmann::ordered_json pj;
    pj["name"] = "p" + std::to_string(i);
    pj["expr"] = expr_str(abstraction_.atoms()[i]);
    j["propositions"].push_back(std::move(pj));
  }
  return j;
}

namespace {

using Lits = std::vector<GuardLit>;
using NextSet = std::vector<std::int32_t>;  // sorted wrapper node ids

struct Alternative {
  Lits lits;
  NextSet nexts;
};

bool add_lit(Lits& lits, GuardLit l) {
  for (const auto& x : lits) {
    if (x.atom == l.atom && x.positive != l.positive) return false;  // contradiction
    if (x.atom == l.atom && x.positive == l.positive) return true;
  }
  lits.push_back(l);
  return true;
}

void add_next(NextSet& nexts, std::int32_t id) {
  auto it = std::lower_bound(nexts.begin(), nexts.end(), id);
  if (it == nexts.end() || *it != id) nexts.insert(it, id);
}

} // namespace

class AutomatonBuilder {
 public:
  AutomatonBuilder(const LtlPtr& phi, const AutomatonBuildOptions& opts) : opts_(opts) {
    std::vector<ExprPtr> atoms;
    root_ = store_.compile(phi, opts.cycle_bound, atoms);
    for (const auto& a : atoms) aut_.abstraction_.intern(a);
  }

  SymbolicAutomaton build() {
    // states are sorted sets of wrapper obligations; the initial state carries
    // the whole formula behind a strong next (consumed by the first valuation)
    NextSet init{store_.snext(root_)};
    state_id(init);
    for (std::size_t s = 0; s < states_.size(); ++s) {
      if (states_.size() > opts_.max_states)
        throw std::runtime_error("automaton construction exceeded state budget");
      expand_state(static_cast<int>(s));
    }
    aut_.by_src_.assign(states_.size(), {});
    for (const auto& t : aut_.transitions_) aut_.by_src_[static_cast<std::size_t>(t.src)].push_back(t);
    return std::move(aut_);
  }

 private:
  AutomatonBuildOptions opts_;
  FormulaStore store_;
  std::int32_t root_;
  std::vector<NextSet> states_;
  std::map<NextSet, int> state_index_;
  SymbolicAutomaton aut_;

  int state_id(const NextSet& s) {
    auto it = state_index_.find(s);
    if (it != state_index_.end()) return it->second;
    int id = static_cast<int>(states_.size());
    states_.push_back(s);
    state_index_.emplace(s, id);
    bool acc = true;
    for (std::int32_t w : s)
      if (!store_.finalize_true(w)) acc = false;
    aut_.accepting_.push_back(acc);
    aut_.labels_.push_back(s.empty() ? "accept" : "s" + std::to_string(id));
    return id;
  }

  // expansion of one runtime formula into (literals, next obligations)
  // alternatives; wrappers encountered inside defer to the next position
  std::vector<Alternative> expand(std::int32_t id) {
    const auto& n = store_.node(id);
    using Op = FormulaStore::Op;
    switch (n.op) {
      case Op::False: return {};
      case Op::True: return {Alternative{}};
      case Op::Lit: {
        Alternative alt;
        alt.lits.push_back(GuardLit{n.a, n.w == 1});
        return {alt};
      }
      case Op::And: {
        auto left = expand(n.a);
        auto right = expand(n.b);
        std::vector<Alternative> out;
        for (const auto& l : left)
          for (const auto& r : right) {
            Alternative alt = l;
            bool ok = true;
            for (const auto& lit : r.lits)
              if (!add_lit(alt.lits, lit)) {
                ok = false;
                break;
              }
            if (!ok) continue;
            for (auto x : r.nexts) add_next(alt.nexts, x);
            out.push_back(std::move(alt));
          }
        return out;
      }
      case Op::Or: {
        auto out = expand(n.a);
        auto right = expand(n.b);
        out.insert(out.end(), right.begin(), right.end());
        return out;
      }
      case Op::SNext:
      case Op::WNext: {
        Alternative alt;
        alt.nexts.push_back(id);
        return {alt};
      }
      case Op::Until: {
        // b now, or a now and the obligation carries over
        auto out = expand(n.b);
        auto cont = expand(n.a);
        for (auto& alt : cont) {
          add_next(alt.nexts, store_.snext(id));
          out.push_back(std::move(alt));
        }
        return out;
      }
      case Op::Release: {
        // b now and (a now or the obligation carries over weakly)
        auto b = expand(n.b);
        auto a = expand(n.a);
        std::vector<Alternative> out;
        for (const auto& rb : b) {
          for (const auto& ra : a) {
            Alternative alt = rb;
            bool ok = true;
            for (const auto& lit : ra.lits)
              if (!add_lit(alt.lits, lit)) {
                ok = false;
                break;
              }
            if (!ok) continue;
            for (auto x : ra.nexts) add_next(alt.nexts, x);
            out.push_back(std::move(alt));
          }
          Alternative weak = rb;
          add_next(weak.nexts, store_.wnext(id));
          out.push_back(std::move(weak));
        }
        return out;
      }
      case Op::EvWithin: {
        auto out = expand(n.a);
        if (n.w > 1) {
          Alternative later;
          later.nexts.push_back(store_.snext(store_.ev_within(n.w - 1, n.a)));
          out.push_back(std::move(later));
        }
        return out;
      }
      case Op::AllWithin: {
        auto now = expand(n.a);
        for (auto& alt : now)
          if (n.w > 1) add_next(alt.nexts, store_.wnext(store_.all_within(n.w - 1, n.a)));
        return now;
      }
    }
    return {};
  }

  void expand_state(int sid) {
    // conjunction over the state's wrappers, each unwrapped for this position
    std::vector<Alternative> alts{Alternative{}};
    for (std::int32_t wrapper : states_[static_cast<std::size_t>(sid)]) {
      const auto& n = store_.node(wrapper);
      std::vector<Alternative> part = expand(n.a);  // unwrap SNext/WNext
      std::vector<Alternative> merged;
      for (const auto& base : alts)
        for (const auto& p : part) {
          Alternative alt = base;
          bool ok = true;
          for (const auto& lit : p.lits)
            if (!add_lit(alt.lits, lit)) {
              ok = false;
              break;
            }
          if (!ok) continue;
          for (auto x : p.nexts) add_next(alt.nexts, x);
          merged.push_back(std::move(alt));
        }
      alts = std::move(merged);
    }
    // deduplicate alternatives
    std::vector<Alternative> unique;
    for (auto& a : alts) {
      std::sort(a.lits.begin(), a.lits.end());
      bool dup = false;
      for (const auto& u : unique)
        if (u.lits == a.lits && u.nexts == a.nexts) {
          dup = true;
          break;
        }
      if (!dup) unique.push_back(std::move(a));
    }
    for (const auto& a : unique) {
      SymbolicTransition t;
      t.src = sid;
      t.dst = state_id(a.nexts);
      t.guard = a.lits;
      t.guard_expr = guard_to_expr(a.lits);
      aut_.transitions_.push_back(std::move(t));
    }
  }

  ExprPtr guard_to_expr(const Lits& lits) {
    ExprPtr e;
    for (const auto& l : lits) {
      ExprPtr atom = aut_.abstraction_.atom(l.atom);
      ExprPtr term = l.positive ? atom : Expr::unary(UnOp::Not, atom);
      e = e ? Expr::binary(BinOp::And, e, term) : term;
    }
    if (opts_.instance_constraint) {
      e = e ? Expr::binary(BinOp::And, e, opts_.instance_constraint)
            : opts_.instance_constraint;
    }
    return e ? e : Expr::make_bool(true);
  }
};

SymbolicAutomaton build_automaton(const LtlPtr& phi, const AutomatonBuildOptions& opts) {
  return AutomatonBuilder(phi, opts).build();
}

StateSet initial_state_set(const SymbolicAutomaton& aut) {
  StateSet s;
  s.states.insert(aut.initial_state());
  return s;
}

StateSet step_state_set(const SymbolicAutomaton& aut, const StateSet& states,
                        const std::vector<bool>& atom_values) {
  StateSet out;
  for (int s : states.states) {
    for (const auto& t : aut.transitions_from(s)) {
      bool ok = true;
      for (const auto& l : t.guard) {
        bool v = l.atom >= 0 && static_cast<std::size_t>(l.atom) < atom_values.size()
                     ? atom_values[static_cast<std::size_t>(l.atom)]
                     : false;
        if (v != l.positive) {
          ok = false;
          break;
        }
      }
      if (ok) out.states.insert(t.dst);
    }
  }
  return out;
}

StateSet step_state_set(const SymbolicAutomaton& aut, const StateSet& states, EvalContext& ctx) {
  std::vector<bool> atom_values;
  atom_values.reserve(aut.abstraction().size());
  for (const auto& a : aut.abstraction().atoms())
    atom_values.push_back(eval_expr(a, ctx).as_bool());
  return step_state_set(aut, states, atom_values);
}

bool state_set_accepting(const SymbolicAutomaton& aut, const StateSet& states) {
  for (int s : states.states)
    if (aut.accepting(s)) return true;
  return false;
}

} // namespace scsl
