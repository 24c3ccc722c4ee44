#include "scsl/world.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>

namespace scsl {

namespace {

// boolean LTL combination over atoms -> plain expression; null when temporal
ExprPtr ltl_to_expr(const LtlPtr& f) {
  if (!f) return nullptr;
  switch (f->kind) {
    case LtlKind::Atom: return f->atom;
    case LtlKind::Not: {
      ExprPtr x = ltl_to_expr(f->lhs);
      return x ? Expr::unary(UnOp::Not, x) : nullptr;
    }
    case LtlKind::And: {
      ExprPtr a = ltl_to_expr(f->lhs), b = ltl_to_expr(f->rhs);
      return a && b ? Expr::binary(BinOp::And, a, b) : nullptr;
    }
    case LtlKind::Or: {
      ExprPtr a = ltl_to_expr(f->lhs), b = ltl_to_expr(f->rhs);
      return a && b ? Expr::binary(BinOp::Or, a, b) : nullptr;
    }
    case LtlKind::Implies: {
      ExprPtr a = ltl_to_expr(f->lhs), b = ltl_to_expr(f->rhs);
      return a && b ? Expr::binary(BinOp::Implies, a, b) : nullptr;
    }
    case LtlKind::Iff: {
      ExprPtr a = ltl_to_expr(f->lhs), b = ltl_to_expr(f->rhs);
      return a && b ? Expr::binary(BinOp::Iff, a, b) : nullptr;
    }
    default: return nullptr;
  }
}

} // namespace

ExprPtr match_termination_pattern(const LtlPtr& f, bool& is_eot) {
  is_eot = false;
  if (!f || f->kind != LtlKind::Globally) return nullptr;
  const LtlPtr& body = f->lhs;
  if (!body || body->kind != LtlKind::Implies) return nullptr;
  const LtlPtr& consequent = body->rhs;
  if (!consequent || consequent->kind != LtlKind::Next) return nullptr;
  const LtlPtr& inner = consequent->lhs;
  if (inner && inner->kind == LtlKind::Not && inner->lhs &&
      inner->lhs->kind == LtlKind::Atom && inner->lhs->atom &&
      inner->lhs->atom->kind == ExprKind::Ident && inner->lhs->atom->str_val == "active")
    return ltl_to_expr(body->lhs);
  if (inner && inner->kind == LtlKind::Atom && inner->atom &&
      inner->atom->kind == ExprKind::Ident && inner->atom->str_val == "EoT") {
    is_eot = true;
    return ltl_to_expr(body->lhs);
  }
  return nullptr;
}

World::World(const Specification& spec, std::map<std::string, Value> consts, WorldConfig cfg,
             std::unique_ptr<SutModel> sut)
    : spec_(spec), consts_(std::move(consts)), cfg_(cfg), sut_(std::move(sut)) {}

Diagnostics World::setup() {
  Diagnostics diags;
  build_collaboration(diags);
  build_instances(diags);
  seed_initial_valuation();
  if (sut_) sut_->init(*this);
  return diags;
}

void World::build_collaboration(Diagnostics& diags) {
  if (!spec_.systest) return;
  for (const auto& od : spec_.systest->collaboration.objects) {
    TypePtr t = od.type;
    if (!t) continue;
    if (t->kind == TypeKind::Array) {
      std::int64_t n = 0;
      if (t->size) {
        std::map<std::string, Value> locals;
        EvalContext ctx;
        ctx.consts = &consts_;
        ctx.locals = &locals;
        ctx.spec = &spec_;
        try {
          n = eval_expr(t->size, ctx).as_int();
        } catch (const RuntimeError& e) {
          diags.push_back(Diagnostic::error(
              "cannot evaluate array extent for '" + od.name + "': " + e.what(), od.span));
        }
      }
      for (std::int64_t i = 0; i < n; ++i) {
        ObjectRuntime obj;
        obj.name = od.name + "[" + std::to_string(i) + "]";
        obj.decl = spec_.find_object_type(t->elem ? t->elem->name : "");
        objects_.push_back(std::move(obj));
      }
    } else {
      ObjectRuntime obj;
      obj.name = od.name;
      obj.decl = spec_.find_object_type(t->name);
      objects_.push_back(std::move(obj));
    }
  }
  for (const auto& ifd : spec_.systest->collaboration.interfaces) {
    auto instantiate_iface = [&](const std::map<std::string, Value>& env) {
      std::map<std::string, Value> locals = env;
      EvalContext ctx;
      ctx.consts = &consts_;
      ctx.locals = &locals;
      ctx.spec = &spec_;
      InterfaceRuntime ir;
      try {
        ir.from = eval_symbol_path(ifd.from, ctx);
        ir.to = eval_symbol_path(ifd.to, ctx);
        ir.id = ifd.name;
        if (ifd.index) ir.id += "[" + std::to_string(eval_expr(ifd.index, ctx).as_int()) + "]";
      } catch (const RuntimeError& e) {
        diags.push_back(
            Diagnostic::error(std::string("interface endpoint: ") + e.what(), ifd.span));
        return;
      }
      interfaces_.push_back(std::move(ir));
    };
    if (!ifd.repl_var.empty()) {
      std::map<std::string, Value> locals;
      EvalContext ctx;
      ctx.consts = &consts_;
      ctx.locals = &locals;
      ctx.spec = &spec_;
      std::int64_t lo = 0, hi = -1;
      try {
        lo = eval_expr(ifd.repl_lo, ctx).as_int();
        hi = eval_expr(ifd.repl_hi, ctx).as_int();
      } catch (const RuntimeError& e) {
        diags.push_back(
            Diagnostic::error(std::string("interface range: ") + e.what(), ifd.span));
      }
      for (std::int64_t i = lo; i <= hi; ++i) {
        std::map<std::string, Value> env{{ifd.repl_var, Value::integer(i)}};
        instantiate_iface(env);
      }
    } else {
      instantiate_iface({});
    }
  }
}

void World::build_instances(Diagnostics& diags) {
  std::vector<InstanceSpec> specs = instantiate_schedule(spec_, consts_, diags);
  // sequential predecessors are re-linked after filtering
  std::map<int, int> index_map;
  std::vector<InstanceSpec> kept;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (!cfg_.instance_filter.empty() && !cfg_.instance_filter.count(specs[i].name)) continue;
    index_map[static_cast<int>(i)] = static_cast<int>(kept.size());
    kept.push_back(specs[i]);
  }
  for (auto& is : kept) {
    if (is.predecessor >= 0) {
      auto it = index_map.find(is.predecessor);
      is.predecessor = it != index_map.end() ? it->second : -1;
    }
  }
  for (auto& is : kept) {
    ScenarioRuntime rt;
    rt.spec = std::move(is);
    rt.lifecycle = rt.spec.predecessor < 0 ? Lifecycle::Runnable : Lifecycle::Passive;
    if (rt.spec.decl) {
      for (const auto& f : rt.spec.decl->specs) {
        MonitorSlot slot;
        slot.formula = f;
        bool is_eot = false;
        ExprPtr premise = match_termination_pattern(f, is_eot);
        if (premise) {
          slot.termination_cond = premise;
          slot.eot_pattern = is_eot;
        } else {
          int c = compute_cycle_bound(spec_, rt.spec, f);
          slot.monitor = std::make_unique<Monitor>(f, c);
        }
        rt.monitors.push_back(std::move(slot));
      }
      rt.chg_prev.assign(rt.spec.decl->cndacts.size(), std::nullopt);
    }
    instances_.push_back(std::move(rt));
  }
}

void World::seed_initial_valuation() {
  sigma_.tick = 0;
  sigma_.set("EoT", Value::boolean(false));
  sigma_.set("t_hat", Value::real(0.0));
  // object handles: arrays under their base name, every object also by name
  std::map<std::string, std::vector<std::string>> arrays;
  for (const auto& obj : objects_) {
    auto lb = obj.name.find('[');
    sigma_.set(obj.name, Value::object(obj.name));
    if (lb != std::string::npos) {
      arrays[obj.name.substr(0, lb)].push_back(obj.name);
    }
    if (!obj.decl) continue;
    for (const auto& p : obj.decl->params) {
      Value v = default_value(p.type, spec_, consts_);
      sigma_.set(obj.name + "." + p.name, v);
    }
  }
  for (const auto& [base, names] : arrays) {
    std::vector<Value> handles;
    for (const auto& n : names) handles.push_back(Value::object(n));
    sigma_.set(base, Value::array(std::move(handles)));
  }
  if (cfg_.record_trace) trace_.push_back(sigma_);
}

ObjectRuntime* World::find_object(const std::string& name) {
  for (auto& o : objects_)
    if (o.name == name) return &o;
  return nullptr;
}

void World::write_symbol(Valuation& v, const std::string& path, const Value& val) {
  // trailing [k] may address an element of an array-typed parameter symbol
  if (!v.find(path) && path.size() > 2 && path.back() == ']') {
    auto lb = path.rfind('[');
    if (lb != std::string::npos) {
      std::string base = path.substr(0, lb);
      std::int64_t idx = std::atoll(path.substr(lb + 1, path.size() - lb - 2).c_str());
      if (Value* arr = const_cast<Value*>(v.find(base))) {
        if (arr->kind() == ValueKind::Array || arr->kind() == ValueKind::List) {
          auto& es = arr->mutable_elements();
          if (idx >= 0 && static_cast<std::size_t>(idx) < es.size()) {
            es[static_cast<std::size_t>(idx)] = val;
            return;
          }
        }
      }
    }
  }
  v.set(path, val);
}

void World::remove_object_symbols(Valuation& v, const std::string& name) {
  // parameter symbols disappear; the null slot marker stays
  for (auto it = v.symbols.begin(); it != v.symbols.end();) {
    if (it->first.rfind(name + ".", 0) == 0)
      it = v.symbols.erase(it);
    else
      ++it;
  }
  v.set(name, Value::null());
  auto lb = name.find('[');
  if (lb != std::string::npos) {
    std::string base = name.substr(0, lb);
    std::int64_t idx = std::atoll(name.substr(lb + 1, name.size() - lb - 2).c_str());
    if (Value* arr = const_cast<Value*>(v.find(base))) {
      if (arr->kind() == ValueKind::Array) {
        auto& es = arr->mutable_elements();
        if (idx >= 0 && static_cast<std::size_t>(idx) < es.size())
          es[static_cast<std::size_t>(idx)] = Value::null();
      }
    }
  }
}

EvalContext World::instance_ctx(ScenarioRuntime& inst, const Valuation& sigma) {
  EvalContext ctx;
  ctx.sigma = &sigma;
  ctx.consts = &consts_;
  ctx.locals = &inst.aux;
  ctx.symbol_bindings = &inst.spec.object_bindings;
  ctx.spec = &spec_;
  return ctx;
}

// conditions and termination premises evaluate over sigma_i, so auxiliaries
// must be read as of sigma_i even after this step's actions updated them
EvalContext World::snapshot_ctx(ScenarioRuntime& inst, const Valuation& sigma) {
  EvalContext ctx;
  ctx.sigma = &sigma;
  ctx.consts = &consts_;
  ctx.locals = &inst.aux_snapshot;
  ctx.symbol_bindings = &inst.spec.object_bindings;
  ctx.spec = &spec_;
  return ctx;
}

std::set<std::string> World::default_frame(const ScenarioRuntime& inst) const {
  // implicitly the complete collection of all parameters of all referenced
  // objects
  std::set<std::string> frame;
  for (const auto& [formal, path] : inst.spec.object_bindings) {
    (void)formal;
    for (const auto& obj : objects_) {
      bool member = obj.name == path || obj.name.rfind(path + "[", 0) == 0;
      if (!member || !obj.decl) continue;
      for (const auto& p : obj.decl->params) {
        if (p.type && p.type->kind == TypeKind::Array) {
          std::int64_t n = 0;
          const Value* arr = sigma_.find(obj.name + "." + p.name);
          if (arr && arr->kind() == ValueKind::Array)
            n = static_cast<std::int64_t>(arr->elements().size());
          for (std::int64_t i = 0; i < n; ++i)
            frame.insert(obj.name + "." + p.name + "[" + std::to_string(i) + "]");
        } else {
          frame.insert(obj.name + "." + p.name);
        }
      }
    }
  }
  return frame;
}

bool World::eval_precondition(ScenarioRuntime& inst, const Valuation& sigma) {
  if (!inst.spec.decl) return false;
  if (!inst.spec.decl->precondition) return true;
  // scalar parameters are visible; auxiliaries are not (not yet initialized)
  std::map<std::string, Value> locals = inst.spec.scalar_params;
  EvalContext ctx;
  ctx.sigma = &sigma;
  ctx.consts = &consts_;
  ctx.locals = &locals;
  ctx.symbol_bindings = &inst.spec.object_bindings;
  ctx.spec = &spec_;
  try {
    return eval_expr(inst.spec.decl->precondition, ctx).as_bool();
  } catch (const RuntimeError&) {
    // references to deleted objects make the precondition false
    return false;
  }
}

void World::run_actions(ScenarioRuntime& inst, const ActionBlock& block,
                        const Valuation& sigma) {
  EvalContext ctx = instance_ctx(inst, sigma);
  ActionEffects effects;
  std::set<std::string> roots;
  for (const auto& [formal, path] : inst.spec.object_bindings) {
    (void)path;
    roots.insert(formal);
  }
  try {
    exec_actions(block, ctx, roots, effects);
  } catch (const RuntimeError& err) {
    if (err.error_kind == RuntimeErrorKind::FrameViolation)
      abort_run(std::string("FRAME-VIOLATION in ") + inst.spec.name + ": " + err.what());
    else
      abort_run(std::string("ILLEGAL-SCHEDULE in ") + inst.spec.name + ": " + err.what());
    return;
  }
  for (auto& [path, value] : effects.symbol_writes) {
    staged_scenario_writes_[path] = {inst.spec.name, value};
    WorldEvent ev;
    ev.tick = tick_ + 1;
    ev.kind = WorldEvent::Kind::ScenarioWrite;
    ev.instance = inst.spec.name;
    ev.symbol = path;
    ev.text = value.str();
    events_.push_back(std::move(ev));
  }
  for (auto& m : effects.mutations)
    staged_mutations_.emplace_back(inst.spec.name, std::move(m));
  if (effects.eot_requested) eot_next_ = true;
}

void World::process_activations(const Valuation& prev, Valuation& next) {
  (void)next;
  for (auto& inst : instances_) {
    if (inst.lifecycle != Lifecycle::Runnable) continue;
    if (!eval_precondition(inst, prev)) continue;
    inst.lifecycle = Lifecycle::Active;
    inst.activation_tick = tick_ + 1;
    inst.aux.clear();
    for (const auto& [k, v] : inst.spec.scalar_params) inst.aux[k] = v;
    inst.aux["active"] = Value::boolean(true);
    std::set<std::string> frame = default_frame(inst);
    std::vector<Value> tokens;
    for (const auto& p : frame) tokens.push_back(Value::token(p));
    inst.aux["frame"] = Value::set(std::move(tokens));
    if (inst.spec.decl && !inst.spec.decl->initact.empty())
      run_actions(inst, inst.spec.decl->initact, prev);
    WorldEvent ev;
    ev.tick = tick_ + 1;
    ev.kind = WorldEvent::Kind::Activation;
    ev.instance = inst.spec.name;
    ev.text = "activated";
    events_.push_back(std::move(ev));
  }
}

void World::process_condition_actions(const Valuation& prev) {
  for (auto& inst : instances_) {
    if (inst.lifecycle != Lifecycle::Active) continue;
    if (inst.activation_tick > tick_) continue;  // becomes active next tick
    if (!inst.spec.decl) continue;
    for (std::size_t ci = 0; ci < inst.spec.decl->cndacts.size(); ++ci) {
      const CondAction& ca = inst.spec.decl->cndacts[ci];
      EvalContext ctx = snapshot_ctx(inst, prev);
      bool cond = false;
      try {
        cond = eval_expr(ca.condition, ctx).as_bool();
      } catch (const RuntimeError& err) {
        abort_run(std::string("ILLEGAL-SCHEDULE in ") + inst.spec.name +
                  " condition: " + err.what());
        return;
      }
      bool fire = false;
      if (ca.kind == CondKind::Guard) {
        fire = cond;
      } else {
        // change condition: false-to-true edge with an active previous tick
        fire = inst.chg_prev[ci].has_value() && !*inst.chg_prev[ci] && cond;
        inst.chg_prev[ci] = cond;
      }
      if (fire) {
        run_actions(inst, ca.actions, prev);
        if (aborted_) return;
      }
    }
  }
}

void World::process_terminations(const Valuation& prev, Valuation& next) {
  (void)next;
  for (auto& inst : instances_) {
    if (inst.lifecycle != Lifecycle::Active || inst.deactivate_next) continue;
    if (inst.activation_tick > tick_) continue;
    for (auto& slot : inst.monitors) {
      if (!slot.termination_cond) continue;
      EvalContext ctx = snapshot_ctx(inst, prev);
      bool cond = false;
      try {
        cond = eval_expr(slot.termination_cond, ctx).as_bool();
      } catch (const RuntimeError& err) {
        abort_run(std::string("ILLEGAL-SCHEDULE in ") + inst.spec.name +
                  " termination condition: " + err.what());
        return;
      }
      if (!cond) continue;
      if (slot.eot_pattern) {
        eot_next_ = true;
      } else {
        inst.deactivate_next = true;
      }
    }
  }
}

void World::advance_object_cycles(const Valuation& prev, Valuation& next) {
  (void)prev;
  for (auto& obj : objects_) {
    if (!obj.alive || !obj.decl) continue;
    obj.phase = (obj.phase + 1) % std::max(1, obj.decl->cycletime);
    if (obj.phase == 0) {
      // cycle boundary: publish the staged outputs, then latch inputs
      for (auto& [param_path, value] : obj.pending_outputs) {
        write_symbol(next, obj.name + "." + param_path, value);
        WorldEvent ev;
        ev.tick = tick_ + 1;
        ev.kind = WorldEvent::Kind::ObjectOutput;
        ev.symbol = obj.name + "." + param_path;
        ev.instance = obj.name;
        ev.text = value.str();
        events_.push_back(std::move(ev));
      }
      obj.pending_outputs.clear();
    }
  }
}

void World::apply_staged(Valuation& next) {
  for (auto& [path, value] : staged_inputs_) {
    // scenario writes take precedence over the engine feed for the same tick
    if (staged_scenario_writes_.count(path)) continue;
    write_symbol(next, path, value);
    WorldEvent ev;
    ev.tick = tick_ + 1;
    ev.kind = WorldEvent::Kind::EngineFeed;
    ev.symbol = path;
    ev.text = value.str();
    events_.push_back(std::move(ev));
  }
  staged_inputs_.clear();
  for (auto& [path, iv] : staged_scenario_writes_) write_symbol(next, path, iv.second);
  staged_scenario_writes_.clear();
}

void World::apply_mutations(Valuation& next) {
  if (staged_mutations_.empty()) return;
  if (cfg_.stress_permute_mutations && staged_mutations_.size() > 1) {
    std::mt19937_64 rng(cfg_.seed ^ static_cast<std::uint64_t>(tick_));
    std::shuffle(staged_mutations_.begin(), staged_mutations_.end(), rng);
  }
  for (auto& [who, m] : staged_mutations_) {
    switch (m.kind) {
      case ActionEffects::Mutation::Kind::Delete: {
        ObjectRuntime* obj = find_object(m.target);
        if (!obj || !obj->alive) continue;  // delete of a null reference: no-op
        obj->alive = false;
        remove_object_symbols(next, m.target);
        std::size_t removed = 0;
        for (auto it = interfaces_.begin(); it != interfaces_.end();) {
          bool touches = it->from.rfind(m.target + ".", 0) == 0 ||
                         it->to.rfind(m.target + ".", 0) == 0;
          if (touches) {
            ++removed;
            it = interfaces_.erase(it);
          } else {
            ++it;
          }
        }
        WorldEvent ev;
        ev.tick = tick_ + 1;
        ev.kind = WorldEvent::Kind::Mutation;
        ev.instance = who;
        ev.symbol = m.target;
        ev.text = "delete " + m.target + " (+" + std::to_string(removed) + " interfaces)";
        events_.push_back(std::move(ev));
        break;
      }
      case ActionEffects::Mutation::Kind::CreateObject: {
        const ObjectTypeDecl* decl = spec_.find_object_type(m.type_name);
        if (!decl) {
          abort_run("create with unknown object type " + m.type_name);
          return;
        }
        ObjectRuntime obj;
        obj.name = m.target;
        obj.decl = decl;
        for (const auto& p : decl->params)
          write_symbol(next, obj.name + "." + p.name, default_value(p.type, spec_, consts_));
        // extend the enclosing array view
        auto lb = m.target.find('[');
        if (lb != std::string::npos) {
          std::string base = m.target.substr(0, lb);
          std::int64_t idx =
              std::atoll(m.target.substr(lb + 1, m.target.size() - lb - 2).c_str());
          if (Value* arr = const_cast<Value*>(next.find(base))) {
            if (arr->kind() == ValueKind::Array) {
              auto& es = arr->mutable_elements();
              if (static_cast<std::int64_t>(es.size()) <= idx)
                es.resize(static_cast<std::size_t>(idx) + 1, Value::null());
              es[static_cast<std::size_t>(idx)] = Value::object(m.target);
            }
          }
        } else {
          next.set(m.target, Value::object(m.target));
        }
        objects_.push_back(std::move(obj));
        WorldEvent ev;
        ev.tick = tick_ + 1;
        ev.kind = WorldEvent::Kind::Mutation;
        ev.instance = who;
        ev.symbol = m.target;
        ev.text = "create " + m.target + " : " + m.type_name;
        events_.push_back(std::move(ev));
        break;
      }
      case ActionEffects::Mutation::Kind::CreateInterface: {
        // dangling endpoints are an error
        auto endpoint_exists = [&](const std::string& path) {
          auto dot = path.find('.');
          if (dot == std::string::npos) return false;
          ObjectRuntime* obj = find_object(path.substr(0, dot));
          return obj && obj->alive;
        };
        if (!endpoint_exists(m.iface_from) || !endpoint_exists(m.iface_to)) {
          abort_run("create interface with dangling endpoint: " + m.iface_from + " -> " +
                    m.iface_to);
          return;
        }
        interfaces_.push_back({m.iface_name, m.iface_from, m.iface_to});
        WorldEvent ev;
        ev.tick = tick_ + 1;
        ev.kind = WorldEvent::Kind::Mutation;
        ev.instance = who;
        ev.symbol = m.iface_name;
        ev.text = "create interface " + m.iface_name + " from " + m.iface_from + " to " +
                  m.iface_to;
        events_.push_back(std::move(ev));
        break;
      }
    }
  }
  staged_mutations_.clear();
}

void World::publish_instance_symbols(Valuation& next) {
  for (auto& inst : instances_) {
    const std::string& name = inst.spec.name;
    bool active_now = inst.lifecycle == Lifecycle::Active && inst.activation_tick <= tick_ + 1 &&
                      !inst.deactivate_next;
    bool lingering = inst.deactivate_next;  // deactivation lands this tick
    if (active_now || lingering) {
      next.set(name + ".active", Value::boolean(active_now));
      for (const auto& [k, v] : inst.aux) {
        if (k == "active") continue;
        next.set(name + "." + k, v);
      }
    } else if (inst.lifecycle == Lifecycle::Terminated) {
      // aux symbols leave the valuation the tick after deactivation
      for (auto it = next.symbols.begin(); it != next.symbols.end();) {
        if (it->first.rfind(name + ".", 0) == 0)
          it = next.symbols.erase(it);
        else
          ++it;
      }
    }
  }
}

void World::feed_monitors(const Valuation& v) {
  for (auto& inst : instances_) {
    if (inst.lifecycle != Lifecycle::Active) continue;
    if (inst.activation_tick > v.tick) continue;
    inst.aux["active"] = Value::boolean(true);
    EvalContext ctx = instance_ctx(inst, v);
    for (auto& slot : inst.monitors) {
      if (!slot.monitor) continue;
      std::vector<bool> atoms;
      atoms.reserve(slot.monitor->atoms().size());
      bool failed = false;
      for (const auto& a : slot.monitor->atoms()) {
        try {
          atoms.push_back(eval_expr(a, ctx).as_bool());
        } catch (const RuntimeError& err) {
          // formulas guard deleted-object reads with `x != null =>`; since the
          // guard is a separate atom, reads through a vanished object resolve
          // null-safe to false rather than aborting
          if (err.error_kind == RuntimeErrorKind::NullDeref ||
              err.error_kind == RuntimeErrorKind::UnboundSymbol) {
            atoms.push_back(false);
            continue;
          }
          abort_run(std::string("ILLEGAL-SCHEDULE in monitor of ") + inst.spec.name + ": " +
                    err.what());
          failed = true;
          break;
        }
      }
      if (failed) return;
      slot.monitor->step(atoms);
    }
  }
}

void World::finalize_instance(ScenarioRuntime& inst) {
  if (inst.finalized) return;
  inst.finalized = true;
  if (inst.lifecycle == Lifecycle::Runnable || inst.lifecycle == Lifecycle::Passive) {
    // never activated: nothing was violated
    inst.verdict = Verdict{VerdictKind::Pass, ""};
    return;
  }
  Verdict v{VerdictKind::Pass, ""};
  for (auto& slot : inst.monitors) {
    Verdict m = slot.monitor ? slot.monitor->finalize() : Verdict{VerdictKind::Pass, ""};
    if (m.fail() && !v.fail()) v = m;
  }
  inst.verdict = v;
}

void World::finalize_all() {
  for (auto& inst : instances_) finalize_instance(inst);
}

void World::abort_run(const std::string& reason) {
  if (aborted_) return;
  aborted_ = true;
  abort_reason_ = reason;
  WorldEvent ev;
  ev.tick = tick_;
  ev.kind = WorldEvent::Kind::Abort;
  ev.text = reason;
  events_.push_back(std::move(ev));
}

void World::seed_symbol(const std::string& path, Value v) {
  if (tick_ == 0 && !trace_.empty()) {
    write_symbol(sigma_, path, v);
    write_symbol(trace_.back(), path, v);
  } else if (tick_ == 0) {
    write_symbol(sigma_, path, v);
  }
}

void World::stage_object_output(const std::string& obj, const std::string& param_path,
                                Value v) {
  if (ObjectRuntime* o = find_object(obj)) o->pending_outputs[param_path] = std::move(v);
}

void World::stage_engine_feed(const std::string& symbol_path, Value v) {
  staged_inputs_[symbol_path] = std::move(v);
}

void World::log_line(const std::string& text) {
  WorldEvent ev;
  ev.tick = tick_ + 1;
  ev.kind = WorldEvent::Kind::Log;
  ev.text = text;
  events_.push_back(std::move(ev));
}

void World::post_event(WorldEvent ev) { events_.push_back(std::move(ev)); }

void World::enqueue_stimulus(const std::map<std::string, Value>& stim) {
  stimuli_queue_.push_back(stim);
}

void World::inject_scenario_write(const std::string& instance, const std::string& symbol,
                                  Value v) {
  staged_scenario_writes_[symbol] = {instance, std::move(v)};
  WorldEvent ev;
  ev.tick = tick_ + 1;
  ev.kind = WorldEvent::Kind::ScenarioWrite;
  ev.instance = instance;
  ev.symbol = symbol;
  ev.text = "injected";
  events_.push_back(std::move(ev));
}

bool World::step() {
  if (ended_ || aborted_) return false;

  const Valuation prev = sigma_;
  for (auto& inst : instances_) inst.aux_snapshot = inst.aux;

  // sequential-composition successors become runnable once the predecessor
  // has left its active phase
  for (auto& inst : instances_) {
    if (inst.lifecycle != Lifecycle::Passive || inst.spec.predecessor < 0) continue;
    const auto& pred = instances_[static_cast<std::size_t>(inst.spec.predecessor)];
    if (pred.lifecycle == Lifecycle::Terminated) inst.lifecycle = Lifecycle::Runnable;
  }

  // scenario-side processing over sigma_i
  process_activations(prev, sigma_);
  if (aborted_) return false;
  process_condition_actions(prev);
  if (aborted_) return false;
  process_terminations(prev, sigma_);
  if (aborted_) return false;

  // executor stimulation and SUT behaviour
  if (!stimuli_queue_.empty()) {
    std::map<std::string, Value> stim = stimuli_queue_.front();
    stimuli_queue_.erase(stimuli_queue_.begin());
    if (sut_) sut_->apply_stimulus(*this, stim);
  }
  if (sut_) sut_->tick(*this);

  // construct sigma_{i+1}
  Valuation next = prev;
  next.tick = tick_ + 1;
  next.set("t_hat", Value::real(static_cast<double>(tick_ + 1) * cfg_.seconds_per_tick));

  // interface propagation over the wiring as of sigma_i
  for (const auto& iface : interfaces_) {
    const Value* v = prev.find(iface.from);
    if (!v) {
      // element of an array-typed parameter
      auto lb = iface.from.rfind('[');
      if (lb != std::string::npos) {
        const Value* arr = prev.find(iface.from.substr(0, lb));
        if (arr && arr->kind() == ValueKind::Array) {
          std::int64_t idx = std::atoll(
              iface.from.substr(lb + 1, iface.from.size() - lb - 2).c_str());
          if (idx >= 0 && static_cast<std::size_t>(idx) < arr->elements().size())
            v = &arr->elements()[static_cast<std::size_t>(idx)];
        }
      }
    }
    if (v) write_symbol(next, iface.to, *v);
  }

  advance_object_cycles(prev, next);
  apply_staged(next);
  publish_instance_symbols(next);
  apply_mutations(next);
  if (aborted_) return false;

  // lifecycle commits for this tick
  for (auto& inst : instances_) {
    if (inst.deactivate_next) {
      inst.deactivate_next = false;
      inst.lifecycle = Lifecycle::Terminated;
      inst.aux["active"] = Value::boolean(false);
      WorldEvent ev;
      ev.tick = tick_ + 1;
      ev.kind = WorldEvent::Kind::Deactivation;
      ev.instance = inst.spec.name;
      ev.text = "terminated";
      events_.push_back(std::move(ev));
      finalize_instance(inst);
    }
  }

  // successors of just-terminated predecessors become runnable before the
  // all-done check, or a chain hand-off would end the run
  for (auto& inst : instances_) {
    if (inst.lifecycle != Lifecycle::Passive || inst.spec.predecessor < 0) continue;
    const auto& pred = instances_[static_cast<std::size_t>(inst.spec.predecessor)];
    if (pred.lifecycle == Lifecycle::Terminated) inst.lifecycle = Lifecycle::Runnable;
  }

  if (cfg_.force_eot_when_idle) {
    bool any_live = false;
    for (const auto& inst : instances_)
      if (inst.lifecycle == Lifecycle::Active || inst.lifecycle == Lifecycle::Runnable)
        any_live = true;
    if (!any_live) eot_next_ = true;
  }

  if (eot_next_) {
    next.set("EoT", Value::boolean(true));
  }

  sigma_ = std::move(next);
  ++tick_;
  if (cfg_.record_trace) trace_.push_back(sigma_);

  feed_monitors(sigma_);
  if (aborted_) return false;

  if (eot_next_) {
    ended_ = true;
    finalize_all();
    return false;
  }
  if (tick_ >= cfg_.max_ticks) {
    timeout_ = true;
    WorldEvent ev;
    ev.tick = tick_;
    ev.kind = WorldEvent::Kind::Timeout;
    ev.text = "tick budget exhausted";
    events_.push_back(std::move(ev));
    ended_ = true;
    finalize_all();
    return false;
  }
  return true;
}

RunResult World::run_to_end() {
  while (step()) {
  }
  return take_result();
}

RunResult World::take_result() {
  finalize_all();
  RunResult r;
  r.trace = std::move(trace_);
  r.events = std::move(events_);
  for (const auto& inst : instances_) r.verdicts[inst.spec.name] = inst.verdict;
  r.aborted = aborted_;
  r.abort_reason = abort_reason_;
  r.timeout = timeout_;
  r.final_tick = tick_;
  return r;
}

void World::observe_external(const Valuation& external) {
  // oracle/simulation agent mode: scenario processing over the previous
  // snapshot, then the externally merged valuation becomes sigma
  const Valuation prev = sigma_;
  for (auto& inst : instances_) inst.aux_snapshot = inst.aux;
  for (auto& inst : instances_) {
    if (inst.lifecycle != Lifecycle::Passive || inst.spec.predecessor < 0) continue;
    const auto& pred = instances_[static_cast<std::size_t>(inst.spec.predecessor)];
    if (pred.lifecycle == Lifecycle::Terminated) inst.lifecycle = Lifecycle::Runnable;
  }
  process_activations(prev, sigma_);
  if (aborted_) return;
  process_condition_actions(prev);
  if (aborted_) return;
  process_terminations(prev, sigma_);
  if (aborted_) return;

  Valuation next = external;
  next.tick = tick_ + 1;
  publish_instance_symbols(next);
  for (auto& inst : instances_) {
    if (inst.deactivate_next) {
      inst.deactivate_next = false;
      inst.lifecycle = Lifecycle::Terminated;
      inst.aux["active"] = Value::boolean(false);
      finalize_instance(inst);
    }
  }
  sigma_ = std::move(next);
  ++tick_;
  if (cfg_.record_trace) trace_.push_back(sigma_);
  feed_monitors(sigma_);
  if (sigma_.eot()) {
    ended_ = true;
    finalize_all();
  }
}

} // namespace scsl
