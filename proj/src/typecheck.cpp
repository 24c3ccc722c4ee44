#include "scsl/typecheck.hpp"

#include <map>
#include <set>

#include "scsl/eval.hpp"

namespace scsl {

namespace {

const TypePtr kBool = TypeExpr::make(TypeKind::Bool);
const TypePtr kInt = TypeExpr::make(TypeKind::Int);
const TypePtr kNat = TypeExpr::make(TypeKind::Nat);
const TypePtr kReal = TypeExpr::make(TypeKind::Real);
const TypePtr kToken = TypeExpr::make(TypeKind::Token);
// assignment target for `frame` and the type of null literals
const TypePtr kSymbolSet = TypeExpr::set_of(TypeExpr::make(TypeKind::Token));
const TypePtr kNull = TypeExpr::named(TypeKind::ObjectRef, "");

bool is_null_type(const TypePtr& t) {
  return t && t->kind == TypeKind::ObjectRef && t->name.empty();
}

// bidirectional compatibility: nat/int interchange, int widens to real,
// null matches any object reference
bool compatible(const TypePtr& a, const TypePtr& b) {
  if (!a || !b) return true;  // error recovery: unknown matches anything
  if (a->kind == TypeKind::ObjectRef && b->kind == TypeKind::ObjectRef)
    return a->name.empty() || b->name.empty() || a->name == b->name;
  if (a->is_integer() && b->is_integer()) return true;
  if (a->is_numeric() && b->is_numeric()) return true;
  // arrays and lists interchange: both are ordered indexable sequences
  auto seq = [](TypeKind k) { return k == TypeKind::Array || k == TypeKind::List; };
  if (a->kind != b->kind && !(seq(a->kind) && seq(b->kind))) return false;
  switch (a->kind) {
    case TypeKind::EnumRef:
    case TypeKind::CompositeRef: return a->name == b->name;
    case TypeKind::Array:
    case TypeKind::List:
    case TypeKind::Set: return compatible(a->elem, b->elem);
    default: return true;
  }
}

class Checker {
 public:
  explicit Checker(const Specification& spec) : spec_(spec) {}

  Diagnostics run() {
    check_types_resolve();
    check_constants();
    check_functions();
    check_object_types();
    for (const auto& sc : spec_.scenarios) check_scenario(sc);
    if (spec_.systest) check_systest(*spec_.systest);
    check_instances();
    return diags_;
  }

 private:
  const Specification& spec_;
  Diagnostics diags_;

  // scenario-scoped state
  const ScenarioTypeDecl* scenario_ = nullptr;
  std::map<std::string, TypePtr> scenario_params_;
  std::map<std::string, TypePtr> aux_types_;
  std::map<std::string, TypePtr> bound_vars_;
  bool in_precondition_ = false;

  void error(const std::string& msg, const SourceSpan& sp) {
    diags_.push_back(Diagnostic::error(msg, sp));
  }

  // ---------------------------------------------------------------------
  // Declarations

  void check_type_resolves(const TypePtr& t, const SourceSpan& sp) {
    if (!t) return;
    switch (t->kind) {
      case TypeKind::EnumRef:
        if (!spec_.find_enum(t->name)) error("unknown enum type '" + t->name + "'", sp);
        break;
      case TypeKind::CompositeRef:
        if (!spec_.find_composite(t->name))
          error("unknown type '" + t->name + "'", sp);
        break;
      case TypeKind::ObjectRef:
        if (!t->name.empty() && !spec_.find_object_type(t->name))
          error("unknown object type '" + t->name + "'", sp);
        break;
      case TypeKind::Array:
        check_type_resolves(t->elem, sp);
        if (t->size) check_const_closed(t->size, sp, "array size expression");
        break;
      case TypeKind::List:
      case TypeKind::Set:
        check_type_resolves(t->elem, sp);
        break;
      default: break;
    }
  }

  // expression may reference only global constants and literals
  void check_const_closed(const ExprPtr& e, const SourceSpan& sp, const std::string& what) {
    if (!e) return;
    if (e->kind == ExprKind::Ident) {
      if (!spec_.find_const(e->str_val) && !spec_.find_enum_literal(e->str_val))
        error(what + " references non-constant '" + e->str_val + "'", sp);
      return;
    }
    if (e->base) check_const_closed(e->base, sp, what);
    for (const auto& a : e->args) check_const_closed(a, sp, what);
    if (e->range_lo) check_const_closed(e->range_lo, sp, what);
    if (e->range_hi) check_const_closed(e->range_hi, sp, what);
    if (e->source) check_const_closed(e->source, sp, what);
    if (e->body && e->bound_var.empty()) check_const_closed(e->body, sp, what);
  }

  void check_types_resolve() {
    for (const auto& c : spec_.composites)
      for (const auto& f : c.fields) check_type_resolves(f.second, c.span);
    for (const auto& c : spec_.constants.entries) check_type_resolves(c.type, c.span);
    for (const auto& f : spec_.functions) {
      for (const auto& p : f.params) check_type_resolves(p.second, f.span);
      check_type_resolves(f.result, f.span);
    }
    for (const auto& o : spec_.object_types)
      for (const auto& p : o.params) check_type_resolves(p.type, o.span);
    for (const auto& s : spec_.scenarios)
      for (const auto& p : s.params) check_type_resolves(p.type, s.span);
    if (spec_.systest)
      for (const auto& o : spec_.systest->collaboration.objects)
        check_type_resolves(o.type, o.span);
  }

  void check_constants() {
    for (const auto& c : spec_.constants.entries) {
      if (c.init) {
        check_const_closed(c.init, c.span, "constant initializer");
        TypePtr t = infer(c.init, c.type);
        if (t && !compatible(t, c.type))
          error("constant '" + c.name + "' initializer has type " + type_str(t) +
                    ", expected " + type_str(c.type),
                c.span);
      }
    }
    for (const auto& e : spec_.constants.constraints) {
      check_const_closed(e, e ? e->span : SourceSpan{}, "constraint");
      TypePtr t = infer(e, kBool);
      if (t && t->kind != TypeKind::Bool)
        error("constraint must be boolean", e->span);
    }
    // constancy of the bound model: constraints must hold after binding
    std::map<std::string, Value> consts;
    Diagnostics bind_diags = bind_constants(spec_, {}, consts);
    for (const auto& e : spec_.constants.constraints) {
      bool closed = true;
      std::function<void(const ExprPtr&)> scan = [&](const ExprPtr& x) {
        if (!x) return;
        if (x->kind == ExprKind::Ident && !consts.count(x->str_val) &&
            !spec_.find_enum_literal(x->str_val))
          closed = false;
        scan(x->base);
        for (const auto& a : x->args) scan(a);
        scan(x->range_lo);
        scan(x->range_hi);
        scan(x->source);
        scan(x->body);
      };
      scan(e);
      if (!closed) continue;  // late-bound constants: checked again at run setup
      EvalContext ctx;
      std::map<std::string, Value> locals;
      ctx.consts = &consts;
      ctx.locals = &locals;
      ctx.spec = &spec_;
      try {
        if (!eval_expr(e, ctx).as_bool())
          error("constant constraint violated: " + expr_str(e), e->span);
      } catch (const RuntimeError&) {
        // constants without values: not checkable statically
      }
    }
  }

  void check_functions() {
    for (const auto& f : spec_.functions) {
      if (f.builtin) {
        if (!is_builtin_function(f.name))
          error("function '" + f.name + "' declared builtin but no builtin exists", f.span);
        continue;
      }
      std::map<std::string, TypePtr> saved = scenario_params_;
      scenario_params_.clear();
      for (const auto& p : f.params) scenario_params_[p.first] = p.second;
      TypePtr t = infer(f.body, f.result);
      if (t && !compatible(t, f.result))
        error("function '" + f.name + "' body has type " + type_str(t) + ", expected " +
                  type_str(f.result),
              f.span);
      scenario_params_ = saved;
    }
  }

  void check_object_types() {
    for (const auto& o : spec_.object_types) {
      if (o.cycletime < 1) error("cycletime must be >= 1", o.span);
      std::set<std::string> names;
      for (const auto& p : o.params)
        if (!names.insert(p.name).second)
          error("duplicate parameter '" + p.name + "' in object type " + o.name, o.span);
    }
  }

  // ---------------------------------------------------------------------
  // Scenario checks

  void check_scenario(const ScenarioTypeDecl& sc) {
    scenario_ = &sc;
    scenario_params_.clear();
    aux_types_.clear();
    bound_vars_.clear();
    std::set<std::string> names;
    for (const auto& p : sc.params) {
      if (!names.insert(p.name).second)
        error("duplicate parameter '" + p.name + "' in scenario " + sc.name, sc.span);
      scenario_params_[p.name] = p.type;
    }
    if (sc.cycle_bound && *sc.cycle_bound < 1)
      error("cyclebound must be >= 1", sc.span);

    // collect auxiliary variable types from actions, in program order
    infer_aux_types(sc.initact);
    for (const auto& ca : sc.cndacts) infer_aux_types(ca.actions);

    if (sc.precondition) {
      in_precondition_ = true;
      TypePtr t = infer(sc.precondition, kBool);
      if (t && t->kind != TypeKind::Bool)
        error("precondition must be boolean", sc.precondition->span);
      in_precondition_ = false;
    }
    for (const auto& f : sc.specs) check_ltl(f);
    check_actions(sc.initact);
    for (const auto& ca : sc.cndacts) {
      TypePtr t = infer(ca.condition, kBool);
      if (t && t->kind != TypeKind::Bool)
        error("condition must be boolean", ca.span);
      check_actions(ca.actions);
    }
    scenario_ = nullptr;
    scenario_params_.clear();
    aux_types_.clear();
  }

  void infer_aux_types(const ActionBlock& block) {
    for (const auto& st : block) infer_aux_stmt(st);
  }

  void infer_aux_stmt(const StmtPtr& st) {
    switch (st->kind) {
      case StmtKind::Assign: {
        const Expr* root = st->lhs.get();
        while (root && (root->kind == ExprKind::Field || root->kind == ExprKind::Index))
          root = root->base.get();
        if (!root || root->kind != ExprKind::Ident) return;
        const std::string& name = root->str_val;
        if (name == "frame" || name == "EoT") return;
        if (scenario_params_.count(name)) return;  // object parameter write
        TypePtr rhs_t = infer_quiet(st->rhs);
        if (!rhs_t) return;
        if (st->lhs->kind != ExprKind::Ident) {
          // indexed first assignment: variable is an array of the element type
          rhs_t = TypeExpr::array_of(rhs_t, nullptr);
        }
        auto it = aux_types_.find(name);
        if (it == aux_types_.end()) {
          aux_types_[name] = rhs_t;
        } else if (!compatible(it->second, rhs_t)) {
          error("conflicting types for auxiliary variable '" + name + "': " +
                    type_str(it->second) + " vs " + type_str(rhs_t),
                st->span);
        }
        return;
      }
      case StmtKind::If: {
        for (const auto& s : st->then_body) infer_aux_stmt(s);
        for (const auto& s : st->else_body) infer_aux_stmt(s);
        return;
      }
      case StmtKind::Foreach: {
        TypePtr src = infer_quiet(st->loop_source);
        TypePtr elem = src && src->elem ? src->elem : kInt;
        bound_vars_[st->loop_var] = elem;
        for (const auto& s : st->loop_body) infer_aux_stmt(s);
        bound_vars_.erase(st->loop_var);
        return;
      }
      default: return;
    }
  }

  void check_ltl(const LtlPtr& f) {
    if (!f) return;
    if (f->kind == LtlKind::Atom) {
      check_atom_symbols(f->atom);
      TypePtr t = infer(f->atom, kBool);
      if (t && t->kind != TypeKind::Bool)
        error("spec atom must be boolean: " + expr_str(f->atom),
              f->atom ? f->atom->span : f->span);
      return;
    }
    check_ltl(f->lhs);
    check_ltl(f->rhs);
  }

  // every auxiliary read in a spec must be assigned somewhere or be a builtin
  void check_atom_symbols(const ExprPtr& e) {
    if (!e) return;
    if (e->kind == ExprKind::Ident) {
      const std::string& n = e->str_val;
      if (n == "active" || n == "EoT" || n == "frame" || n == "t_hat") return;
      if (scenario_params_.count(n) || bound_vars_.count(n)) return;
      if (spec_.find_const(n) || spec_.find_enum_literal(n) || spec_.find_function(n)) return;
      if (aux_types_.count(n)) return;
      error("symbol '" + n + "' is read in a spec but never assigned", e->span);
      return;
    }
    // other instances' `active` cannot be referenced
    if (e->kind == ExprKind::Field && e->str_val == "active")
      error("cross-instance reads of 'active' are not permitted", e->span);
    check_atom_symbols(e->base);
    for (const auto& a : e->args) check_atom_symbols(a);
    if (!e->bound_var.empty()) bound_vars_[e->bound_var] = kInt;
    check_atom_symbols(e->range_lo);
    check_atom_symbols(e->range_hi);
    check_atom_symbols(e->source);
    check_atom_symbols(e->body);
    if (!e->bound_var.empty()) bound_vars_.erase(e->bound_var);
  }

  void check_actions(const ActionBlock& block) {
    for (const auto& st : block) check_stmt(st);
  }

  void check_stmt(const StmtPtr& st) {
    switch (st->kind) {
      case StmtKind::Assign: {
        const Expr* root = st->lhs.get();
        while (root && (root->kind == ExprKind::Field || root->kind == ExprKind::Index))
          root = root->base.get();
        if (!root || root->kind != ExprKind::Ident) {
          error("unsupported assignment target", st->span);
          return;
        }
        const std::string& name = root->str_val;
        if (name == "active" || name == "t_hat") {
          error("'" + name + "' is engine-owned and cannot be assigned", st->span);
          return;
        }
        if (name == "frame") {
          // checked dynamically; elements must be object parameter paths
          return;
        }
        if (name == "EoT") {
          TypePtr t = infer(st->rhs, kBool);
          if (t && t->kind != TypeKind::Bool) error("EoT must be assigned a boolean", st->span);
          return;
        }
        TypePtr lhs_t = infer(st->lhs, nullptr);
        TypePtr rhs_t = infer(st->rhs, lhs_t);
        if (lhs_t && rhs_t && !compatible(lhs_t, rhs_t))
          error("assignment type mismatch: " + type_str(lhs_t) + " := " + type_str(rhs_t),
                st->span);
        return;
      }
      case StmtKind::If: {
        TypePtr t = infer(st->cond, kBool);
        if (t && t->kind != TypeKind::Bool) error("if condition must be boolean", st->span);
        for (const auto& s : st->then_body) check_stmt(s);
        for (const auto& s : st->else_body) check_stmt(s);
        return;
      }
      case StmtKind::Foreach: {
        TypePtr src = infer(st->loop_source, nullptr);
        if (src && src->kind != TypeKind::Set && src->kind != TypeKind::List &&
            src->kind != TypeKind::Array)
          error("foreach source must be a collection", st->span);
        TypePtr elem = src && src->elem ? src->elem : kInt;
        bound_vars_[st->loop_var] = elem;
        for (const auto& s : st->loop_body) check_stmt(s);
        bound_vars_.erase(st->loop_var);
        return;
      }
      case StmtKind::CollDelete: {
        TypePtr t = infer(st->lhs, nullptr);
        if (t && t->kind != TypeKind::ObjectRef)
          error("delete target must be an object reference", st->span);
        return;
      }
      case StmtKind::CollCreateObject:
      case StmtKind::CollCreateInterface:
        return;
    }
  }

  // ---------------------------------------------------------------------
  // System test configuration

  void check_systest(const SystemTestConfig& cfg) {
    std::map<std::string, TypePtr> coll_objects;
    for (const auto& o : cfg.collaboration.objects) {
      TypePtr t = o.type;
      bool ok = t && (t->kind == TypeKind::ObjectRef ||
                      (t->kind == TypeKind::Array && t->elem &&
                       t->elem->kind == TypeKind::ObjectRef));
      if (!ok) {
        error("collaboration member '" + o.name + "' must have an object type", o.span);
        continue;
      }
      coll_objects[o.name] = t;
    }

    for (const auto& ifd : cfg.collaboration.interfaces) {
      auto endpoint = [&](const ExprPtr& e, ParamDir want,
                          const char* which) -> TypePtr {
        // path shape: obj(.param)([i])* rooted at a collaboration object
        const Expr* root = e.get();
        while (root && (root->kind == ExprKind::Field || root->kind == ExprKind::Index))
          root = root->base.get();
        if (!root || root->kind != ExprKind::Ident || !coll_objects.count(root->str_val)) {
          error(std::string("interface ") + which + " endpoint must name a collaboration object",
                ifd.span);
          return nullptr;
        }
        TypePtr obj_t = coll_objects[root->str_val];
        if (obj_t->kind == TypeKind::Array) obj_t = obj_t->elem;
        const ObjectTypeDecl* decl = spec_.find_object_type(obj_t->name);
        if (!decl) return nullptr;
        // find the parameter segment (the field access on the object)
        const Expr* cur = e.get();
        std::string param_name;
        while (cur) {
          if (cur->kind == ExprKind::Field) {
            param_name = cur->str_val;
            break;
          }
          cur = cur->base.get();
        }
        for (const auto& p : decl->params) {
          if (p.name == param_name) {
            if (p.dir != want) {
              if (want == ParamDir::Out)
                error("interface source must be an out parameter", ifd.span);
              else
                error("interface target must be an in parameter", ifd.span);
            }
            TypePtr t = p.type;
            // indexing into an array-typed parameter yields the element
            if (e->kind == ExprKind::Index && t->kind == TypeKind::Array) t = t->elem;
            return t;
          }
        }
        error("unknown parameter '" + param_name + "' on object type " + decl->name, ifd.span);
        return nullptr;
      };
      bound_vars_[ifd.repl_var.empty() ? "_" : ifd.repl_var] = kInt;
      TypePtr from_t = endpoint(ifd.from, ParamDir::Out, "source");
      TypePtr to_t = endpoint(ifd.to, ParamDir::In, "target");
      bound_vars_.erase(ifd.repl_var.empty() ? "_" : ifd.repl_var);
      if (from_t && to_t && !compatible(from_t, to_t))
        error("interface endpoint types differ: " + type_str(from_t) + " vs " + type_str(to_t),
              ifd.span);
    }

    check_schedule(cfg.schedule, coll_objects);
  }

  void check_schedule(const SchedulePtr& n, const std::map<std::string, TypePtr>& coll) {
    if (!n) return;
    switch (n->kind) {
      case ScheduleKind::Leaf: {
        const ScenarioTypeDecl* sc = spec_.find_scenario(n->scenario);
        if (!sc) {
          error("schedule references unknown scenario '" + n->scenario + "'", n->span);
          return;
        }
        if (sc->params.size() != n->args.size()) {
          error("scenario '" + n->scenario + "' expects " +
                    std::to_string(sc->params.size()) + " arguments, got " +
                    std::to_string(n->args.size()),
                n->span);
          return;
        }
        for (std::size_t i = 0; i < n->args.size(); ++i) {
          TypePtr t = infer_schedule_arg(n->args[i], coll, sc->params[i].type);
          if (t && !compatible(t, sc->params[i].type))
            error("argument " + std::to_string(i + 1) + " of " + n->scenario + " has type " +
                      type_str(t) + ", expected " + type_str(sc->params[i].type),
                  n->span);
        }
        return;
      }
      case ScheduleKind::Seq:
      case ScheduleKind::Par:
        for (const auto& c : n->children) check_schedule(c, coll);
        return;
      case ScheduleKind::Replicate: {
        check_const_closed(n->lo, n->span, "replication range");
        check_const_closed(n->hi, n->span, "replication range");
        bound_vars_[n->var] = kInt;
        check_schedule(n->body, coll);
        bound_vars_.erase(n->var);
        return;
      }
    }
  }

  TypePtr infer_schedule_arg(const ExprPtr& e, const std::map<std::string, TypePtr>& coll,
                             const TypePtr& expected) {
    // `coll.x` resolves against the collaboration
    if (e->kind == ExprKind::Field && e->base && e->base->kind == ExprKind::Ident &&
        e->base->str_val == "coll") {
      auto it = coll.find(e->str_val);
      if (it == coll.end()) {
        error("collaboration has no member '" + e->str_val + "'", e->span);
        return nullptr;
      }
      return it->second;
    }
    if (e->kind == ExprKind::Index && e->base && e->base->kind == ExprKind::Field &&
        e->base->base && e->base->base->kind == ExprKind::Ident &&
        e->base->base->str_val == "coll") {
      auto it = coll.find(e->base->str_val);
      if (it == coll.end()) {
        error("collaboration has no member '" + e->base->str_val + "'", e->span);
        return nullptr;
      }
      if (it->second->kind != TypeKind::Array) {
        error("'" + e->base->str_val + "' is not an object array", e->span);
        return nullptr;
      }
      return it->second->elem;
    }
    if (e->kind == ExprKind::Ident && e->str_val == "coll")
      return TypeExpr::make(TypeKind::Collaboration);
    return infer(e, expected);
  }

  void check_instances() {
    for (const auto& inst : spec_.instances) {
      const ScenarioTypeDecl* sc = spec_.find_scenario(inst.scenario);
      if (!sc) {
        error("instance '" + inst.name + "' references unknown scenario '" + inst.scenario + "'",
              inst.span);
        continue;
      }
      for (const auto& [pname, expr] : inst.bindings) {
        const ScenarioParam* param = nullptr;
        for (const auto& p : sc->params)
          if (p.name == pname) param = &p;
        if (!param) {
          error("scenario '" + sc->name + "' has no parameter '" + pname + "'", inst.span);
          continue;
        }
        // object arguments may reference collaboration members by name
        if (param->type && param->type->kind == TypeKind::ObjectRef) continue;
        TypePtr t = infer(expr, param->type);
        if (t && !compatible(t, param->type))
          error("binding '" + pname + "' has type " + type_str(t) + ", expected " +
                    type_str(param->type),
                inst.span);
      }
    }
  }

  // ---------------------------------------------------------------------
  // Expression typing

  TypePtr infer_quiet(const ExprPtr& e) {
    std::size_t mark = diags_.size();
    TypePtr t = infer(e, nullptr);
    diags_.resize(mark);
    return t;
  }

  TypePtr infer(const ExprPtr& e, const TypePtr& expected) {
    if (!e) return nullptr;
    switch (e->kind) {
      case ExprKind::BoolLit: return kBool;
      case ExprKind::IntLit: return e->int_val >= 0 ? kNat : kInt;
      case ExprKind::RealLit: return kReal;
      case ExprKind::StringLit: return kToken;
      case ExprKind::NullLit: return kNull;
      case ExprKind::Ident: return infer_ident(e, expected);
      case ExprKind::Field: return infer_field(e);
      case ExprKind::Index: {
        TypePtr base = infer(e->base, nullptr);
        TypePtr it = infer(e->args[0], kInt);
        if (it && !it->is_integer()) error("index must be an integer", e->span);
        if (!base) return nullptr;
        if (base->kind == TypeKind::Array || base->kind == TypeKind::List) return base->elem;
        error("indexing into non-array " + type_str(base), e->span);
        return nullptr;
      }
      case ExprKind::Call: return infer_call(e, expected);
      case ExprKind::Unary: {
        if (e->un_op == UnOp::Not) {
          TypePtr t = infer(e->args[0], kBool);
          if (t && t->kind != TypeKind::Bool) error("'!' needs a boolean", e->span);
          return kBool;
        }
        if (e->un_op == UnOp::Card) {
          TypePtr t = infer(e->args[0], nullptr);
          if (t && t->kind != TypeKind::Set && t->kind != TypeKind::List &&
              t->kind != TypeKind::Array)
            error("'#' needs a collection", e->span);
          return kNat;
        }
        TypePtr t = infer(e->args[0], expected);
        if (t && !t->is_numeric()) error("unary '-' needs a number", e->span);
        return t && t->kind == TypeKind::Real ? kReal : kInt;
      }
      case ExprKind::Binary: return infer_binary(e);
      case ExprKind::SetLit:
      case ExprKind::ListLit: {
        TypePtr want_elem =
            expected && (expected->kind == TypeKind::Set || expected->kind == TypeKind::List ||
                         expected->kind == TypeKind::Array)
                ? expected->elem
                : nullptr;
        TypePtr elem = want_elem;
        for (const auto& a : e->args) {
          TypePtr t = infer(a, elem);
          if (!elem) elem = t;
          else if (t && !compatible(elem, t))
            error("mixed element types in collection literal", e->span);
        }
        if (e->kind == ExprKind::SetLit) return TypeExpr::set_of(elem);
        if (expected && expected->kind == TypeKind::Array)
          return TypeExpr::array_of(elem, nullptr);
        return TypeExpr::list_of(elem);
      }
      case ExprKind::TupleLit: {
        const CompositeDecl* target = nullptr;
        if (expected && expected->kind == TypeKind::CompositeRef)
          target = spec_.find_composite(expected->name);
        if (!target) {
          for (const auto& c : spec_.composites)
            if (c.fields.size() == e->args.size()) {
              target = &c;
              break;
            }
        }
        if (!target) {
          error("no composite type with " + std::to_string(e->args.size()) + " fields", e->span);
          return nullptr;
        }
        for (std::size_t i = 0; i < e->args.size() && i < target->fields.size(); ++i) {
          TypePtr t = infer(e->args[i], target->fields[i].second);
          if (t && !compatible(t, target->fields[i].second))
            error("field " + target->fields[i].first + " of " + target->name + " has type " +
                      type_str(target->fields[i].second) + ", got " + type_str(t),
                  e->span);
        }
        return TypeExpr::named(TypeKind::CompositeRef, target->name);
      }
      case ExprKind::SetComp: {
        check_int_range(e);
        bound_vars_[e->bound_var] = kInt;
        TypePtr t = infer(e->body, kBool);
        if (t && t->kind != TypeKind::Bool)
          error("comprehension predicate must be boolean", e->span);
        bound_vars_.erase(e->bound_var);
        return TypeExpr::set_of(kNat);
      }
      case ExprKind::SetMap: {
        TypePtr bound = kInt;
        if (e->source) {
          TypePtr src = infer(e->source, nullptr);
          if (src && src->elem) bound = src->elem;
        } else {
          check_int_range(e);
        }
        bound_vars_[e->bound_var] = bound;
        TypePtr elem;
        for (const auto& a : e->args) {
          TypePtr t = infer(a, nullptr);
          if (!elem) elem = t;
        }
        bound_vars_.erase(e->bound_var);
        return TypeExpr::set_of(elem);
      }
      case ExprKind::Forall: {
        check_int_range(e);
        bound_vars_[e->bound_var] = kInt;
        TypePtr t = infer(e->body, kBool);
        if (t && t->kind != TypeKind::Bool) error("forall body must be boolean", e->span);
        bound_vars_.erase(e->bound_var);
        return kBool;
      }
    }
    return nullptr;
  }

  void check_int_range(const ExprPtr& e) {
    TypePtr lo = infer(e->range_lo, kInt);
    TypePtr hi = infer(e->range_hi, kInt);
    if ((lo && !lo->is_integer()) || (hi && !hi->is_integer()))
      error("range bounds must be integers", e->span);
  }

  TypePtr infer_ident(const ExprPtr& e, const TypePtr& expected) {
    const std::string& n = e->str_val;
    if (auto it = bound_vars_.find(n); it != bound_vars_.end()) return it->second;
    if (auto it = scenario_params_.find(n); it != scenario_params_.end()) return it->second;
    if (!in_precondition_) {
      if (auto it = aux_types_.find(n); it != aux_types_.end()) return it->second;
      if (n == "active" || n == "EoT") return kBool;
      if (n == "t_hat") return kReal;
      if (n == "frame") return kSymbolSet;
    } else {
      if (aux_types_.count(n) || n == "active" || n == "frame") {
        error("precondition references auxiliary variable '" + n + "'", e->span);
        return nullptr;
      }
      if (n == "EoT") return kBool;
      if (n == "t_hat") return kReal;
    }
    if (const ConstDecl* c = spec_.find_const(n)) return c->type;
    if (auto lit = spec_.find_enum_literal(n))
      return TypeExpr::named(TypeKind::EnumRef, lit->first);
    (void)expected;
    error("unknown symbol '" + n + "'", e->span);
    return nullptr;
  }

  TypePtr infer_field(const ExprPtr& e) {
    TypePtr base = infer(e->base, nullptr);
    if (!base) return nullptr;
    if (base->kind == TypeKind::ObjectRef) {
      const ObjectTypeDecl* decl = spec_.find_object_type(base->name);
      if (!decl) return nullptr;
      for (const auto& p : decl->params)
        if (p.name == e->str_val) return p.type;
      error("object type " + base->name + " has no parameter '" + e->str_val + "'", e->span);
      return nullptr;
    }
    if (base->kind == TypeKind::CompositeRef) {
      const CompositeDecl* decl = spec_.find_composite(base->name);
      if (!decl) return nullptr;
      for (const auto& f : decl->fields)
        if (f.first == e->str_val) return f.second;
      error("composite " + base->name + " has no field '" + e->str_val + "'", e->span);
      return nullptr;
    }
    error("field access on " + type_str(base), e->span);
    return nullptr;
  }

  TypePtr infer_call(const ExprPtr& e, const TypePtr&) {
    const std::string& fn = e->str_val;
    if (fn == "popfront") {
      if (e->args.size() != 1) {
        error("popfront takes one list argument", e->span);
        return nullptr;
      }
      TypePtr t = infer(e->args[0], nullptr);
      if (t && t->kind != TypeKind::List) error("popfront needs a list", e->span);
      return t ? t->elem : nullptr;
    }
    if (fn == "min" || fn == "max") {
      if (e->args.size() != 1) {
        error(fn + " takes one collection argument", e->span);
        return nullptr;
      }
      TypePtr t = infer(e->args[0], nullptr);
      if (t && t->kind != TypeKind::Set && t->kind != TypeKind::List)
        error(fn + " needs a set or list", e->span);
      return t && t->elem ? t->elem : kInt;
    }
    if (const FunctionDecl* fd = spec_.find_function(fn)) {
      if (e->args.size() != fd->params.size())
        error("function " + fn + " expects " + std::to_string(fd->params.size()) +
                  " arguments, got " + std::to_string(e->args.size()),
              e->span);
      for (std::size_t i = 0; i < e->args.size() && i < fd->params.size(); ++i) {
        TypePtr t = infer(e->args[i], fd->params[i].second);
        if (t && !compatible(t, fd->params[i].second))
          error("argument " + std::to_string(i + 1) + " of " + fn + " has type " + type_str(t) +
                    ", expected " + type_str(fd->params[i].second),
                e->span);
      }
      return fd->result;
    }
    if (const CompositeDecl* cd = spec_.find_composite(fn)) {
      if (e->args.size() != cd->fields.size())
        error("constructor " + fn + " expects " + std::to_string(cd->fields.size()) +
                  " fields",
              e->span);
      for (std::size_t i = 0; i < e->args.size() && i < cd->fields.size(); ++i)
        infer(e->args[i], cd->fields[i].second);
      return TypeExpr::named(TypeKind::CompositeRef, cd->name);
    }
    error("unknown function '" + fn + "'", e->span);
    return nullptr;
  }

  TypePtr infer_binary(const ExprPtr& e) {
    switch (e->bin_op) {
      case BinOp::And: case BinOp::Or: case BinOp::Implies: case BinOp::Iff: {
        TypePtr l = infer(e->args[0], kBool);
        TypePtr r = infer(e->args[1], kBool);
        if ((l && l->kind != TypeKind::Bool) || (r && r->kind != TypeKind::Bool))
          error("boolean operator over non-boolean operands", e->span);
        return kBool;
      }
      case BinOp::Eq: case BinOp::Ne: {
        TypePtr l = infer(e->args[0], nullptr);
        TypePtr r = infer(e->args[1], l);
        if (l && r && !compatible(l, r) && !is_null_type(l) && !is_null_type(r))
          error("comparison of incompatible types " + type_str(l) + " and " + type_str(r),
                e->span);
        return kBool;
      }
      case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge: {
        TypePtr l = infer(e->args[0], nullptr);
        TypePtr r = infer(e->args[1], l);
        if (l && r && !(l->is_numeric() && r->is_numeric()))
          error("ordering comparison needs numbers", e->span);
        return kBool;
      }
      case BinOp::In: {
        TypePtr l = infer(e->args[0], nullptr);
        TypePtr r = infer(e->args[1], l ? TypeExpr::set_of(l) : nullptr);
        if (r && r->kind != TypeKind::Set && r->kind != TypeKind::List &&
            r->kind != TypeKind::Array)
          error("'in' needs a collection on the right", e->span);
        if (l && r && r->elem && !compatible(l, r->elem))
          error("'in' element type mismatch", e->span);
        return kBool;
      }
      case BinOp::Add: case BinOp::Sub: case BinOp::Mul: case BinOp::Div: case BinOp::Mod: {
        TypePtr l = infer(e->args[0], nullptr);
        TypePtr r = infer(e->args[1], l);
        if (e->bin_op == BinOp::Add && l && l->kind == TypeKind::List) return l;
        if ((l && !l->is_numeric()) || (r && !r->is_numeric())) {
          error("arithmetic over non-numeric operands", e->span);
          return nullptr;
        }
        if ((l && l->kind == TypeKind::Real) || (r && r->kind == TypeKind::Real)) return kReal;
        return kInt;
      }
      case BinOp::Union: case BinOp::SetMinus: {
        TypePtr l = infer(e->args[0], nullptr);
        TypePtr r = infer(e->args[1], l);
        if ((l && l->kind != TypeKind::Set) || (r && r->kind != TypeKind::Set))
          error("set operator over non-set operands", e->span);
        return l ? l : r;
      }
    }
    return nullptr;
  }
};

} // namespace

Diagnostics typecheck(const Specification& spec) { return Checker(spec).run(); }

} // namespace scsl
