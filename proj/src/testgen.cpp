#include "scsl/testgen.hpp"

#include <functional>
#include <sstream>

#include "scsl/automaton.hpp"
#include "scsl/parser.hpp"
#include "scsl/eval.hpp"
#include "scsl/sched_graph.hpp"
#include "scsl/solver.hpp"

namespace scsl {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// stimulation symbols of an instance: parameters of the referenced objects,
// bound through the instance's formal names (r.pos -> r[2].pos)
void collect_stimulation_symbols(const Specification& spec, const InstanceSpec& inst,
                                 const ExprPtr& guard,
                                 std::vector<std::pair<std::string, TypePtr>>& out) {
  std::function<void(const ExprPtr&)> scan = [&](const ExprPtr& e) {
    if (!e) return;
    // formal.param paths: Field over a bound object formal
    if (e->kind == ExprKind::Field || e->kind == ExprKind::Index) {
      // find root formal
      const Expr* root = e.get();
      while (root && (root->kind == ExprKind::Field || root->kind == ExprKind::Index))
        root = root->base.get();
      if (root && root->kind == ExprKind::Ident && inst.decl) {
        for (const auto& p : inst.decl->params) {
          if (p.name != root->str_val || !p.type) continue;
          TypePtr ot = p.type->kind == TypeKind::Array ? p.type->elem : p.type;
          if (!ot || ot->kind != TypeKind::ObjectRef) continue;
          const ObjectTypeDecl* od = spec.find_object_type(ot->name);
          if (!od) continue;
          // the full path expression names a parameter of the object
          std::string key = expr_str(e);
          const Expr* f = e.get();
          std::string pname;
          while (f) {
            if (f->kind == ExprKind::Field) {
              pname = f->str_val;
              break;
            }
            f = f->base.get();
          }
          for (const auto& op : od->params) {
            if (op.name != pname) continue;
            TypePtr t = op.type;
            if (e->kind == ExprKind::Index && t && t->kind == TypeKind::Array) t = t->elem;
            bool seen = false;
            for (const auto& [k, tt] : out) {
              (void)tt;
              if (k == key) seen = true;
            }
            if (!seen) out.emplace_back(key, t);
          }
        }
      }
    }
    scan(e->base);
    for (const auto& a : e->args) scan(a);
    scan(e->range_lo);
    scan(e->range_hi);
    scan(e->source);
    scan(e->body);
  };
  scan(guard);
}

// guard rewritten over flat symbol keys so the solver can treat parameter
// paths as assignable symbols
ExprPtr flatten_guard_symbols(const ExprPtr& e) {
  if (!e) return e;
  if (e->kind == ExprKind::Field || e->kind == ExprKind::Index) {
    // only fold paths with literal indices
    std::function<bool(const ExprPtr&)> foldable = [&](const ExprPtr& x) {
      if (x->kind == ExprKind::Ident) return true;
      if (x->kind == ExprKind::Field) return foldable(x->base);
      if (x->kind == ExprKind::Index)
        return x->args[0]->kind == ExprKind::IntLit && foldable(x->base);
      return false;
    };
    if (foldable(e)) return Expr::ident(expr_str(e), e->span);
  }
  auto copy = std::make_shared<Expr>(*e);
  copy->base = flatten_guard_symbols(e->base);
  for (auto& a : copy->args) a = flatten_guard_symbols(a);
  copy->range_lo = flatten_guard_symbols(e->range_lo);
  copy->range_hi = flatten_guard_symbols(e->range_hi);
  copy->source = flatten_guard_symbols(e->source);
  copy->body = flatten_guard_symbols(e->body);
  return copy;
}

struct Generator {
  const Specification& spec;
  const std::map<std::string, Value>& consts;
  const GenBudget& budget;
  TestSuite suite;
  int case_counter = 0;

  void init_cases() {
    // initialization phase synthesized from the placement constants; items
    // first, then zones, then the start signal
    auto item_pos = consts.find("itemPos");
    TestCase init;
    init.name = "Scenario-" + std::to_string(++case_counter) + "-Initialization";
    TestStep step;
    if (item_pos != consts.end() && item_pos->second.kind() == ValueKind::Array) {
      const auto& items = item_pos->second.elements();
      for (std::size_t j = 0; j < items.size(); ++j) {
        std::string base = "set_item" + std::to_string(j + 1);
        step.stimulation[base] = Value::boolean(true);
        if (items[j].kind() == ValueKind::Record && items[j].fields().size() >= 2) {
          step.stimulation[base + "_x"] = items[j].fields()[0].second;
          step.stimulation[base + "_y"] = items[j].fields()[1].second;
        }
      }
    }
    auto zones = consts.find("exclusionZone");
    if (zones != consts.end() && zones->second.kind() == ValueKind::Array) {
      const auto& zs = zones->second.elements();
      for (std::size_t z = 0; z < zs.size(); ++z) {
        if (zs[z].kind() != ValueKind::Record || zs[z].fields().empty()) continue;
        std::string base = "set_zone" + std::to_string(z + 1);
        step.stimulation[base] = Value::boolean(true);
        const auto& verts = zs[z].fields()[0].second;
        int vi = 0;
        for (const auto& v : verts.elements()) {
          if (v.kind() != ValueKind::Record || v.fields().size() < 2) continue;
          ++vi;
          step.stimulation[base + "_v" + std::to_string(vi) + "_x"] = v.fields()[0].second;
          step.stimulation[base + "_v" + std::to_string(vi) + "_y"] = v.fields()[1].second;
        }
      }
    }
    if (!step.stimulation.empty()) {
      init.steps.push_back(std::move(step));
      suite.cases.push_back(std::move(init));

      TestCase start;
      start.name = "Scenario-" + std::to_string(++case_counter) + "-Start";
      TestStep sstep;
      sstep.stimulation["simulation_start"] = Value::boolean(true);
      start.steps.push_back(std::move(sstep));
      suite.cases.push_back(std::move(start));
    } else {
      --case_counter;  // nothing synthesized
    }
  }

  void run() {
    init_cases();
    Diagnostics diags;
    std::vector<InstanceSpec> instances = instantiate_schedule(spec, consts, diags);
    if (instances.empty()) return;
    SchedulingGraph graph = build_scheduling_graph(instances);
    std::vector<std::vector<int>> paths = enumerate_paths(graph);
    int path_count = 0;
    for (const auto& path : paths) {
      if (++path_count > budget.max_paths) {
        suite.reports.push_back("path budget exhausted; suite incomplete");
        suite.complete = false;
        break;
      }
      generate_for_path(graph, instances, path);
    }
  }

  void generate_for_path(const SchedulingGraph& graph,
                         const std::vector<InstanceSpec>& instances,
                         const std::vector<int>& path) {
    // instances along the path, in order (skipping the synthetic start)
    std::vector<const InstanceSpec*> chain;
    std::string path_name;
    for (int node : path) {
      int idx = graph.nodes[static_cast<std::size_t>(node)].instance;
      if (idx < 0) continue;
      chain.push_back(&instances[static_cast<std::size_t>(idx)]);
      if (!path_name.empty()) path_name += ".";
      path_name += instances[static_cast<std::size_t>(idx)].name;
    }
    if (chain.empty()) return;
    std::vector<TestStep> steps;
    std::map<std::string, Value> gc_state;  // guarded-command temporaries
    int emitted = 0;
    dfs_chain(chain, 0, {}, steps, gc_state, path_name, emitted);
  }

  void dfs_chain(const std::vector<const InstanceSpec*>& chain, std::size_t pos,
                 std::optional<StateSet> states, std::vector<TestStep>& steps,
                 std::map<std::string, Value>& gc_state, const std::string& path_name,
                 int& emitted) {
    if (emitted >= budget.max_cases_per_path) return;
    if (pos == chain.size()) return;
    const InstanceSpec& inst = *chain[pos];
    LtlPtr phi = build_phi_scsl(*inst.decl);
    AutomatonBuildOptions opts;
    opts.cycle_bound = compute_cycle_bound(spec, inst, phi);
    opts.instance_constraint = instance_constraint(inst);
    SymbolicAutomaton aut;
    try {
      aut = build_automaton(phi, opts);
    } catch (const std::exception& err) {
      suite.reports.push_back("automaton for " + inst.name + " failed: " + err.what());
      return;
    }
    dfs_automaton(chain, pos, aut, aut.initial_state(), 0, steps, gc_state, path_name, emitted);
  }

  void dfs_automaton(const std::vector<const InstanceSpec*>& chain, std::size_t pos,
                     const SymbolicAutomaton& aut, int state, int depth,
                     std::vector<TestStep>& steps, std::map<std::string, Value>& gc_state,
                     const std::string& path_name, int& emitted) {
    if (emitted >= budget.max_cases_per_path) return;
    const InstanceSpec& inst = *chain[pos];
    if (aut.accepting(state)) {
      // instance satisfied; move to the successor on the path, or emit
      if (pos + 1 < chain.size()) {
        std::map<std::string, Value> gc_copy = gc_state;
        dfs_chain(chain, pos + 1, {}, steps, gc_copy, path_name, emitted);
      } else if (!steps.empty()) {
        TestCase c;
        c.name = "Scenario-" + std::to_string(++case_counter) + "-" + path_name;
        c.steps = steps;
        suite.cases.push_back(std::move(c));
        ++emitted;
      }
      return;
    }
    if (depth >= budget.max_depth) {
      suite.reports.push_back("depth budget reached in " + inst.name + "; suite incomplete");
      suite.complete = false;
      return;
    }
    bool any_sat = false;
    for (const auto& t : aut.transitions_from(state)) {
      std::optional<TestStep> step = solve_transition(inst, aut, t, gc_state);
      if (!step) continue;
      any_sat = true;
      std::map<std::string, Value> gc_copy = gc_state;
      apply_condition_actions(inst, *step, gc_copy);
      steps.push_back(*step);
      dfs_automaton(chain, pos, aut, t.dst, depth + 1, steps, gc_copy, path_name, emitted);
      steps.pop_back();
      if (emitted >= budget.max_cases_per_path) return;
    }
    if (!any_sat && depth == 0)
      suite.reports.push_back("UNSAT: no satisfiable transition from the initial state of " +
                              inst.name);
  }

  std::optional<TestStep> solve_transition(const InstanceSpec& inst,
                                           const SymbolicAutomaton& aut,
                                           const SymbolicTransition& t,
                                           const std::map<std::string, Value>& gc_state) {
    ExprPtr guard = t.guard_expr ? t.guard_expr : Expr::make_bool(true);
    ExprPtr flat = flatten_guard_symbols(guard);

    std::vector<std::pair<std::string, TypePtr>> symbols;
    collect_stimulation_symbols(spec, inst, guard, symbols);
    // flat keys for the solver
    std::vector<std::pair<std::string, TypePtr>> flat_symbols;
    for (auto& [k, tp] : symbols) flat_symbols.emplace_back(k, tp);
    // scalar parameters participate as fixed bindings
    SolverProblem prob;
    prob.spec = &spec;
    prob.consts = &consts;
    prob.symbols = flat_symbols;
    prob.fixed = gc_state;
    for (const auto& [k, v] : inst.scalar_params) prob.fixed[k] = v;
    prob.max_nodes = budget.solver_nodes;

    std::optional<std::map<std::string, Value>> witness;
    try {
      witness = solve_guard(flat, prob);
    } catch (const UnsupportedTerm& err) {
      suite.reports.push_back(std::string("transition guard dropped: ") + err.what());
      return std::nullopt;
    }
    if (!witness) return std::nullopt;

    TestStep step;
    step.transition = aut.state_label(t.src) + " -> " + aut.state_label(t.dst);
    step.guard = expr_str(guard);
    step.stimulation = *witness;
    // the concrete valuation includes the instance parameter bindings
    for (const auto& [k, v] : inst.scalar_params) step.stimulation[k] = v;
    // soundness: the emitted valuation satisfies its guard under eval_expr
    std::map<std::string, Value> env = prob.fixed;
    for (const auto& [k, v] : *witness) env[k] = v;
    EvalContext ctx;
    ctx.consts = &consts;
    ctx.locals = &env;
    ctx.spec = &spec;
    try {
      if (!eval_expr(flat, ctx).as_bool()) {
        suite.reports.push_back("witness failed re-check on " + step.transition);
        return std::nullopt;
      }
    } catch (const RuntimeError&) {
      // guards over symbols outside the witness (observations) cannot be
      // fully re-checked at generation time
    }
    return step;
  }

  void apply_condition_actions(const InstanceSpec& inst, const TestStep& step,
                               std::map<std::string, Value>& gc_state) {
    if (!inst.decl) return;
    std::map<std::string, Value> env = gc_state;
    for (const auto& [k, v] : step.stimulation) env[k] = v;
    for (const auto& [k, v] : inst.scalar_params) env[k] = v;
    EvalContext ctx;
    ctx.consts = &consts;
    ctx.locals = &env;
    ctx.spec = &spec;
    for (const auto& ca : inst.decl->cndacts) {
      bool fire = false;
      try {
        fire = eval_expr(ca.condition, ctx).as_bool();
      } catch (const RuntimeError&) {
        continue;  // condition over runtime-only symbols
      }
      if (!fire) continue;
      ActionEffects effects;
      try {
        exec_actions(ca.actions, ctx, {}, effects);
      } catch (const RuntimeError&) {
        continue;
      }
    }
    // keep only temporary-variable updates
    for (const auto& [k, v] : env) {
      if (step.stimulation.count(k) || inst.scalar_params.count(k)) continue;
      gc_state[k] = v;
    }
  }
};

} // namespace

TestSuite generate(const Specification& spec, const std::map<std::string, Value>& consts,
                   std::uint64_t seed, const GenBudget& budget, Diagnostics& diags) {
  (void)diags;
  Generator gen{spec, consts, budget, {}, 0};
  gen.suite.name = spec.systest ? "systest-suite" : "suite";
  gen.suite.seed = seed;
  gen.suite.spec_hash =
      "fnv1a:" + std::to_string(fnv1a(render(spec)));
  if (budget.max_paths > 0 && budget.max_depth > 0) {
    gen.run();
  } else {
    gen.suite.reports.push_back("generation budget is zero; suite is empty");
    gen.suite.complete = false;
  }
  return std::move(gen.suite);
}

// ---------------------------------------------------------------------------
// Serialization (field names per the suite format: name, stimulation,
// expected_observations, condition)

namespace {

nlohmann::ordered_json value_to_wire(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Bool: return v.as_bool();
    case ValueKind::Int: return v.as_int();
    case ValueKind::Real: return v.as_real();
    case ValueKind::Enum: return v.enum_literal();
    case ValueKind::Token: return v.token_value();
    default: return v.to_json();
  }
}

Value value_from_wire(const nlohmann::ordered_json& j) {
  if (j.is_boolean()) return Value::boolean(j.get<bool>());
  if (j.is_number_integer()) return Value::integer(j.get<std::int64_t>());
  if (j.is_number_float()) return Value::real(j.get<double>());
  if (j.is_string()) return Value::token(j.get<std::string>());
  return Value::from_json(j);
}

nlohmann::ordered_json step_to_json(const TestStep& s, bool bare) {
  nlohmann::ordered_json j;
  if (!bare) {
    if (!s.transition.empty()) j["transition"] = s.transition;
    if (!s.guard.empty()) j["guard"] = s.guard;
  }
  nlohmann::ordered_json stim = nlohmann::ordered_json::object();
  for (const auto& [k, v] : s.stimulation) stim[k] = value_to_wire(v);
  j["stimulation"] = std::move(stim);
  j["expected_observations"] = nlohmann::ordered_json{{"condition", s.expected_condition}};
  return j;
}

TestStep step_from_json(const nlohmann::ordered_json& j) {
  TestStep s;
  s.transition = j.value("transition", "");
  s.guard = j.value("guard", "");
  if (j.contains("stimulation"))
    for (auto it = j["stimulation"].begin(); it != j["stimulation"].end(); ++it)
      s.stimulation[it.key()] = value_from_wire(it.value());
  if (j.contains("expected_observations"))
    s.expected_condition = j["expected_observations"].value("condition", "");
  return s;
}

} // namespace

nlohmann::ordered_json case_to_json(const TestCase& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  if (c.steps.size() == 1) {
    // single-step cases keep the flat layout of the suite format
    nlohmann::ordered_json flat = step_to_json(c.steps[0], true);
    for (auto it = flat.begin(); it != flat.end(); ++it) j[it.key()] = it.value();
  } else {
    j["steps"] = nlohmann::ordered_json::array();
    for (const auto& s : c.steps) j["steps"].push_back(step_to_json(s, false));
  }
  return j;
}

TestCase case_from_json(const nlohmann::ordered_json& j) {
  TestCase c;
  c.name = j.value("name", "");
  if (j.contains("steps")) {
    for (const auto& sj : j["steps"]) c.steps.push_back(step_from_json(sj));
  } else {
    c.steps.push_back(step_from_json(j));
  }
  return c;
}

std::string serialize_suite(const TestSuite& suite) {
  nlohmann::ordered_json j;
  j["name"] = suite.name;
  j["metadata"] = nlohmann::ordered_json{
      {"spec_hash", suite.spec_hash}, {"seed", suite.seed}, {"complete", suite.complete}};
  if (!suite.reports.empty()) j["metadata"]["reports"] = suite.reports;
  j["cases"] = nlohmann::ordered_json::array();
  for (const auto& c : suite.cases) j["cases"].push_back(case_to_json(c));
  return j.dump(2) + "\n";
}

TestSuite load_suite(const std::string& text) {
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(text);
  TestSuite suite;
  if (j.is_object() && !j.contains("cases")) {
    // a bare case document is a one-case suite
    suite.name = j.value("name", "suite");
    suite.cases.push_back(case_from_json(j));
    return suite;
  }
  suite.name = j.value("name", "suite");
  if (j.contains("metadata")) {
    suite.spec_hash = j["metadata"].value("spec_hash", "");
    suite.seed = j["metadata"].value("seed", 0ull);
    suite.complete = j["metadata"].value("complete", true);
    if (j["metadata"].contains("reports"))
      for (const auto& r : j["metadata"]["reports"]) suite.reports.push_back(r);
  }
  for (const auto& cj : j["cases"]) suite.cases.push_back(case_from_json(cj));
  return suite;
}

bool suite_equal(const TestSuite& a, const TestSuite& b) {
  if (a.name != b.name || a.cases.size() != b.cases.size()) return false;
  for (std::size_t i = 0; i < a.cases.size(); ++i) {
    const auto& x = a.cases[i];
    const auto& y = b.cases[i];
    if (x.name != y.name || x.steps.size() != y.steps.size()) return false;
    for (std::size_t s = 0; s < x.steps.size(); ++s) {
      if (x.steps[s].stimulation.size() != y.steps[s].stimulation.size()) return false;
      auto it2 = y.steps[s].stimulation.begin();
      for (const auto& [k, v] : x.steps[s].stimulation) {
        if (it2->first != k || it2->second.compare(v) != 0) return false;
        ++it2;
      }
      if (x.steps[s].expected_condition != y.steps[s].expected_condition) return false;
    }
  }
  return true;
}

} // namespace scsl
