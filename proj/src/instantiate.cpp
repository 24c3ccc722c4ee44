#include "scsl/instantiate.hpp"

#include <functional>

#include "scsl/eval.hpp"

namespace scsl {

namespace {

// Strips the `coll.` prefix and renders the remaining path with evaluated
// indices: coll.r[i] with i=2 -> "r[2]".
std::string resolve_object_path(const ExprPtr& e, EvalContext& ctx, bool& is_collab) {
  is_collab = false;
  if (e->kind == ExprKind::Ident) {
    if (e->str_val == "coll") {
      is_collab = true;
      return "";
    }
    return e->str_val;
  }
  if (e->kind == ExprKind::Field) {
    bool ic = false;
    std::string base = resolve_object_path(e->base, ctx, ic);
    if (ic) return e->str_val;  // coll.<name>
    return base + "." + e->str_val;
  }
  if (e->kind == ExprKind::Index) {
    bool ic = false;
    std::string base = resolve_object_path(e->base, ctx, ic);
    std::int64_t idx = eval_expr(e->args[0], ctx).as_int();
    return base + "[" + std::to_string(idx) + "]";
  }
  throw RuntimeError(RuntimeErrorKind::TypeMismatch,
                     "not an object path: " + expr_str(e));
}

struct Expander {
  const Specification& spec;
  const std::map<std::string, Value>& consts;
  Diagnostics& diags;
  std::vector<InstanceSpec> out;
  std::map<std::string, int> type_counters;

  EvalContext ctx(std::map<std::string, Value>& locals) {
    EvalContext c;
    c.consts = &consts;
    c.locals = &locals;
    c.spec = &spec;
    return c;
  }

  void bind_args(InstanceSpec& inst, const std::vector<ExprPtr>& args,
                 std::map<std::string, Value>& locals, const SourceSpan& span) {
    const ScenarioTypeDecl* decl = inst.decl;
    if (!decl) return;
    if (args.size() != decl->params.size()) {
      diags.push_back(Diagnostic::error(
          "instance of " + decl->name + " has wrong arity", span));
      return;
    }
    EvalContext c = ctx(locals);
    for (std::size_t i = 0; i < args.size(); ++i) {
      const ScenarioParam& p = decl->params[i];
      bool is_object =
          p.type && (p.type->kind == TypeKind::ObjectRef ||
                     (p.type->kind == TypeKind::Array && p.type->elem &&
                      p.type->elem->kind == TypeKind::ObjectRef));
      if (p.type && p.type->kind == TypeKind::Collaboration) {
        inst.collab_params.push_back(p.name);
        continue;
      }
      if (is_object) {
        try {
          bool ic = false;
          inst.object_bindings[p.name] = resolve_object_path(args[i], c, ic);
        } catch (const RuntimeError& err) {
          diags.push_back(Diagnostic::error(
              "cannot resolve object argument for " + p.name + ": " + err.what(), span));
        }
        continue;
      }
      try {
        inst.scalar_params[p.name] = eval_expr(args[i], c);
      } catch (const RuntimeError& err) {
        diags.push_back(Diagnostic::error(
            "cannot evaluate argument for " + p.name + ": " + err.what(), span));
      }
    }
  }

  std::string display_name(const std::string& type_name,
                           const std::map<std::string, Value>& repl_env) {
    std::string name = type_name;
    // replication indices turn into 1-based display suffixes: Approach3
    for (const auto& [var, val] : repl_env) {
      (void)var;
      if (val.kind() == ValueKind::Int)
        name += std::to_string(val.as_int() + 1);
    }
    int& counter = type_counters[name];
    ++counter;
    if (counter > 1) name += "#" + std::to_string(counter);
    return name;
  }

  // returns (first instance indices, last instance indices) of the subtree
  std::pair<std::vector<int>, std::vector<int>> walk(const SchedulePtr& node,
                                                     std::map<std::string, Value>& repl_env,
                                                     const std::vector<int>& preds) {
    switch (node->kind) {
      case ScheduleKind::Leaf: {
        InstanceSpec inst;
        inst.decl = spec.find_scenario(node->scenario);
        if (!inst.decl) {
          diags.push_back(Diagnostic::error(
              "schedule references unknown scenario '" + node->scenario + "'", node->span));
          return {{}, {}};
        }
        inst.name = display_name(node->scenario, repl_env);
        std::map<std::string, Value> locals = repl_env;
        // substitute replication indices inside argument expressions
        std::vector<ExprPtr> args;
        for (const auto& a : node->args) args.push_back(a);
        bind_args(inst, args, locals, node->span);
        inst.predecessor = preds.empty() ? -1 : preds.front();
        int id = static_cast<int>(out.size());
        out.push_back(std::move(inst));
        return {{id}, {id}};
      }
      case ScheduleKind::Seq: {
        std::vector<int> first, last = preds;
        std::vector<int> entry;
        for (std::size_t i = 0; i < node->children.size(); ++i) {
          auto [f, l] = walk(node->children[i], repl_env, last);
          if (i == 0) entry = f;
          last = l;
        }
        return {entry, last};
      }
      case ScheduleKind::Par: {
        std::vector<int> first, last;
        for (const auto& c : node->children) {
          auto [f, l] = walk(c, repl_env, preds);
          first.insert(first.end(), f.begin(), f.end());
          last.insert(last.end(), l.begin(), l.end());
        }
        return {first, last};
      }
      case ScheduleKind::Replicate: {
        std::map<std::string, Value> locals = repl_env;
        EvalContext c = ctx(locals);
        std::int64_t lo = 0, hi = -1;
        try {
          lo = eval_expr(node->lo, c).as_int();
          hi = eval_expr(node->hi, c).as_int();
        } catch (const RuntimeError& err) {
          diags.push_back(Diagnostic::error(
              std::string("replication range not evaluable: ") + err.what(), node->span));
          return {{}, {}};
        }
        std::vector<int> first, last;
        for (std::int64_t i = lo; i <= hi; ++i) {
          repl_env[node->var] = Value::integer(i);
          auto [f, l] = walk(node->body, repl_env, preds);
          first.insert(first.end(), f.begin(), f.end());
          last.insert(last.end(), l.begin(), l.end());
        }
        repl_env.erase(node->var);
        return {first, last};
      }
    }
    return {{}, {}};
  }
};

} // namespace

std::vector<InstanceSpec> instantiate_schedule(const Specification& spec,
                                               const std::map<std::string, Value>& consts,
                                               Diagnostics& diags) {
  Expander ex{spec, consts, diags, {}, {}};
  if (spec.systest && spec.systest->schedule) {
    std::map<std::string, Value> env;
    ex.walk(spec.systest->schedule, env, {});
  }
  // standalone instance declarations join as parallel instances
  for (const auto& inst_decl : spec.instances) {
    // unify by name with schedule-declared instances
    bool exists = false;
    for (const auto& i : ex.out)
      if (i.name == inst_decl.name) exists = true;
    if (exists) continue;
    InstanceSpec inst;
    inst.decl = spec.find_scenario(inst_decl.scenario);
    if (!inst.decl) {
      diags.push_back(Diagnostic::error(
          "instance references unknown scenario '" + inst_decl.scenario + "'", inst_decl.span));
      continue;
    }
    inst.name = inst_decl.name;
    std::map<std::string, Value> locals;
    // rebuild positional arguments from named bindings
    std::vector<ExprPtr> args(inst.decl->params.size());
    bool ok = true;
    for (std::size_t i = 0; i < inst.decl->params.size(); ++i) {
      const std::string& pname = inst.decl->params[i].name;
      for (const auto& [bname, bexpr] : inst_decl.bindings)
        if (bname == pname) args[i] = bexpr;
      if (!args[i]) {
        diags.push_back(Diagnostic::error(
            "instance " + inst.name + " leaves parameter '" + pname + "' unbound",
            inst_decl.span));
        ok = false;
      }
    }
    if (!ok) continue;
    ex.bind_args(inst, args, locals, inst_decl.span);
    ex.out.push_back(std::move(inst));
  }
  return std::move(ex.out);
}

int compute_cycle_bound(const Specification& spec, const InstanceSpec& inst, const LtlPtr& phi) {
  if (inst.decl && inst.decl->cycle_bound) return *inst.decl->cycle_bound;
  std::vector<ExprPtr> atoms;
  ltl_atoms(phi, atoms);
  int c = 1;
  std::function<void(const ExprPtr&)> scan = [&](const ExprPtr& e) {
    if (!e) return;
    if (e->kind == ExprKind::Ident) {
      auto it = inst.object_bindings.find(e->str_val);
      if (it != inst.object_bindings.end() && inst.decl) {
        for (const auto& p : inst.decl->params) {
          if (p.name != e->str_val || !p.type) continue;
          TypePtr t = p.type->kind == TypeKind::Array ? p.type->elem : p.type;
          if (t && t->kind == TypeKind::ObjectRef) {
            const ObjectTypeDecl* od = spec.find_object_type(t->name);
            if (od && od->cycletime > c) c = od->cycletime;
          }
        }
      }
      return;
    }
    scan(e->base);
    for (const auto& a : e->args) scan(a);
    scan(e->range_lo);
    scan(e->range_hi);
    scan(e->source);
    scan(e->body);
  };
  for (const auto& a : atoms) scan(a);
  return c;
}

ExprPtr value_to_expr(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Bool: return Expr::make_bool(v.as_bool());
    case ValueKind::Int: return Expr::make_int(v.as_int());
    case ValueKind::Real: return Expr::make_real(v.as_real());
    case ValueKind::Enum: return Expr::ident(v.enum_literal());
    case ValueKind::Token: return Expr::make_string(v.token_value());
    case ValueKind::Null: return Expr::make_null();
    case ValueKind::Record: {
      std::vector<ExprPtr> args;
      for (const auto& f : v.fields()) args.push_back(value_to_expr(f.second));
      return Expr::call(v.record_type(), std::move(args));
    }
    case ValueKind::Array:
    case ValueKind::List: {
      std::vector<ExprPtr> args;
      for (const auto& e : v.elements()) args.push_back(value_to_expr(e));
      return Expr::list_lit(std::move(args));
    }
    case ValueKind::Set: {
      std::vector<ExprPtr> args;
      for (const auto& e : v.elements()) args.push_back(value_to_expr(e));
      return Expr::set_lit(std::move(args));
    }
    case ValueKind::Object: return Expr::ident(v.object_handle());
  }
  return Expr::make_null();
}

ExprPtr instance_constraint(const InstanceSpec& inst) {
  ExprPtr e;
  for (const auto& [name, value] : inst.scalar_params) {
    ExprPtr term = Expr::binary(BinOp::Eq, Expr::ident(name), value_to_expr(value));
    e = e ? Expr::binary(BinOp::And, e, term) : term;
  }
  return e;
}

} // namespace scsl
