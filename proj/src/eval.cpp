#include "scsl/eval.hpp"

#include <algorithm>

#include "scsl/geometry.hpp"

namespace scsl {

namespace {

Point value_to_point(const Value& v) {
  if (v.kind() != ValueKind::Record || v.fields().size() < 2)
    throw RuntimeError(RuntimeErrorKind::TypeMismatch,
                       "expected a location record, got " + v.str());
  return {v.fields()[0].second.as_real(), v.fields()[1].second.as_real()};
}

std::vector<Point> zone_to_polygon(const Value& zone) {
  if (zone.kind() != ValueKind::Record || zone.fields().empty())
    throw RuntimeError(RuntimeErrorKind::TypeMismatch, "expected a zone record");
  std::vector<Point> poly;
  for (const auto& v : zone.fields()[0].second.elements()) poly.push_back(value_to_point(v));
  return poly;
}

double close_to_epsilon(EvalContext& ctx) {
  if (ctx.consts) {
    auto it = ctx.consts->find("epsilon");
    if (it != ctx.consts->end()) return it->second.as_real();
  }
  return 1.0;
}

Value builtin_in_exclusion_zone(const std::vector<Value>& args, EvalContext&) {
  const Point p = value_to_point(args.at(0));
  const Value& zones = args.at(1);
  if (zones.kind() == ValueKind::Record)
    return Value::boolean(point_in_polygon(p, zone_to_polygon(zones)));
  for (const auto& z : zones.elements())
    if (!z.is_null() && point_in_polygon(p, zone_to_polygon(z))) return Value::boolean(true);
  return Value::boolean(false);
}

Value builtin_is_close_to(const std::vector<Value>& args, EvalContext& ctx) {
  const Point a = value_to_point(args.at(0));
  const Point b = value_to_point(args.at(1));
  return Value::boolean(euclidean_distance(a, b) <= close_to_epsilon(ctx));
}

} // namespace

bool is_builtin_function(const std::string& name) {
  return name == "inExclusionZone" || name == "isCloseTo";
}

static Value eval_ident(const std::string& name, EvalContext& ctx, const SourceSpan& sp) {
  if (ctx.locals) {
    auto it = ctx.locals->find(name);
    if (it != ctx.locals->end()) return it->second;
  }
  if (ctx.symbol_bindings) {
    auto it = ctx.symbol_bindings->find(name);
    if (it != ctx.symbol_bindings->end()) {
      if (const Value* v = ctx.lookup_symbol(it->second)) return *v;
      throw RuntimeError(RuntimeErrorKind::UnboundSymbol,
                         "object '" + it->second + "' not in valuation (" + sp.str() + ")");
    }
  }
  if (const Value* v = ctx.lookup_symbol(name)) return *v;
  if (ctx.consts) {
    auto it = ctx.consts->find(name);
    if (it != ctx.consts->end()) return it->second;
  }
  if (ctx.spec) {
    auto lit = ctx.spec->find_enum_literal(name);
    if (lit) return Value::enum_lit(lit->first, lit->second, name);
  }
  throw RuntimeError(RuntimeErrorKind::UnboundSymbol,
                     "unbound symbol '" + name + "' (" + sp.str() + ")");
}

static Value eval_field_of(const Value& base, const std::string& field, EvalContext& ctx,
                           const SourceSpan& sp) {
  if (base.is_null())
    throw RuntimeError(RuntimeErrorKind::NullDeref,
                       "attribute '" + field + "' of null object (" + sp.str() + ")");
  if (base.kind() == ValueKind::Object) {
    std::string path = base.object_handle() + "." + field;
    if (const Value* v = ctx.lookup_symbol(path)) return *v;
    throw RuntimeError(RuntimeErrorKind::UnboundSymbol,
                       "symbol '" + path + "' not in valuation (" + sp.str() + ")");
  }
  return base.field(field);
}

Value eval_expr(const ExprPtr& e, EvalContext& ctx) {
  if (!e) throw RuntimeError(RuntimeErrorKind::TypeMismatch, "empty expression");
  switch (e->kind) {
    case ExprKind::BoolLit: return Value::boolean(e->bool_val);
    case ExprKind::IntLit: return Value::integer(e->int_val);
    case ExprKind::RealLit: return Value::real(e->real_val);
    case ExprKind::StringLit: return Value::token(e->str_val);
    case ExprKind::NullLit: return Value::null();
    case ExprKind::Ident: return eval_ident(e->str_val, ctx, e->span);
    case ExprKind::Field: {
      Value base = eval_expr(e->base, ctx);
      return eval_field_of(base, e->str_val, ctx, e->span);
    }
    case ExprKind::Index: {
      Value base = eval_expr(e->base, ctx);
      Value idx = eval_expr(e->args[0], ctx);
      const auto& elems = base.elements();
      std::int64_t i = idx.as_int();
      if (i < 0 || static_cast<std::size_t>(i) >= elems.size())
        throw RuntimeError(RuntimeErrorKind::UnboundSymbol,
                           "index " + std::to_string(i) + " out of range (" + e->span.str() + ")");
      return elems[static_cast<std::size_t>(i)];
    }
    case ExprKind::Call: {
      const std::string& fn = e->str_val;
      if (fn == "popfront") {
        // returns the head and removes it from the (local) list variable
        if (e->args.size() != 1 || e->args[0]->kind != ExprKind::Ident || !ctx.locals)
          throw RuntimeError(RuntimeErrorKind::TypeMismatch,
                             "popfront requires a local list variable");
        auto it = ctx.locals->find(e->args[0]->str_val);
        if (it == ctx.locals->end())
          throw RuntimeError(RuntimeErrorKind::UnboundSymbol,
                             "popfront of unbound '" + e->args[0]->str_val + "'");
        auto& elems = it->second.mutable_elements();
        if (elems.empty())
          throw RuntimeError(RuntimeErrorKind::EmptyCollection, "popfront of empty list");
        Value head = elems.front();
        elems.erase(elems.begin());
        return head;
      }
      if (fn == "min" || fn == "max") {
        Value v = eval_expr(e->args.at(0), ctx);
        const auto& elems = v.elements();
        if (elems.empty())
          throw RuntimeError(RuntimeErrorKind::EmptyCollection, fn + " of empty collection");
        return fn == "min" ? *std::min_element(elems.begin(), elems.end())
                           : *std::max_element(elems.begin(), elems.end());
      }
      std::vector<Value> args;
      args.reserve(e->args.size());
      for (const auto& a : e->args) args.push_back(eval_expr(a, ctx));
      if (fn == "inExclusionZone") return builtin_in_exclusion_zone(args, ctx);
      if (fn == "isCloseTo") return builtin_is_close_to(args, ctx);
      if (ctx.spec) {
        if (const FunctionDecl* fd = ctx.spec->find_function(fn)) {
          if (fd->builtin) {
            if (fn == "inExclusionZone") return builtin_in_exclusion_zone(args, ctx);
            if (fn == "isCloseTo") return builtin_is_close_to(args, ctx);
            throw RuntimeError(RuntimeErrorKind::UnboundSymbol, "unknown builtin " + fn);
          }
          std::map<std::string, Value> locals;
          for (std::size_t i = 0; i < fd->params.size() && i < args.size(); ++i)
            locals[fd->params[i].first] = args[i];
          EvalContext inner = ctx;
          inner.locals = &locals;
          inner.symbol_bindings = nullptr;
          return eval_expr(fd->body, inner);
        }
        if (const CompositeDecl* cd = ctx.spec->find_composite(fn)) {
          std::vector<std::pair<std::string, Value>> fields;
          for (std::size_t i = 0; i < cd->fields.size(); ++i)
            fields.emplace_back(cd->fields[i].first,
                                i < args.size() ? args[i] : Value::null());
          return Value::record(cd->name, std::move(fields));
        }
      }
      throw RuntimeError(RuntimeErrorKind::UnboundSymbol,
                         "unknown function '" + fn + "' (" + e->span.str() + ")");
    }
    case ExprKind::Unary: {
      if (e->un_op == UnOp::Not) return Value::boolean(!eval_expr(e->args[0], ctx).as_bool());
      if (e->un_op == UnOp::Card)
        return Value::integer(static_cast<std::int64_t>(eval_expr(e->args[0], ctx).elements().size()));
      Value v = eval_expr(e->args[0], ctx);
      if (v.kind() == ValueKind::Int) return Value::integer(-v.as_int());
      return Value::real(-v.as_real());
    }
    case ExprKind::Binary: {
      switch (e->bin_op) {
        case BinOp::And:
          if (!eval_expr(e->args[0], ctx).as_bool()) return Value::boolean(false);
          return Value::boolean(eval_expr(e->args[1], ctx).as_bool());
        case BinOp::Or:
          if (eval_expr(e->args[0], ctx).as_bool()) return Value::boolean(true);
          return Value::boolean(eval_expr(e->args[1], ctx).as_bool());
        case BinOp::Implies:
          if (!eval_expr(e->args[0], ctx).as_bool()) return Value::boolean(true);
          return Value::boolean(eval_expr(e->args[1], ctx).as_bool());
        case BinOp::Iff:
          return Value::boolean(eval_expr(e->args[0], ctx).as_bool() ==
                                eval_expr(e->args[1], ctx).as_bool());
        default: break;
      }
      Value l = eval_expr(e->args[0], ctx);
      Value r = eval_expr(e->args[1], ctx);
      switch (e->bin_op) {
        case BinOp::Eq: return Value::boolean(l.compare(r) == 0);
        case BinOp::Ne: return Value::boolean(l.compare(r) != 0);
        case BinOp::Lt: return Value::boolean(l.compare(r) < 0);
        case BinOp::Le: return Value::boolean(l.compare(r) <= 0);
        case BinOp::Gt: return Value::boolean(l.compare(r) > 0);
        case BinOp::Ge: return Value::boolean(l.compare(r) >= 0);
        case BinOp::Add:
          if (l.kind() == ValueKind::Int && r.kind() == ValueKind::Int)
            return Value::integer(l.as_int() + r.as_int());
          if (l.kind() == ValueKind::List && r.kind() == ValueKind::List) {
            std::vector<Value> es = l.elements();
            for (const auto& v : r.elements()) es.push_back(v);
            return Value::list(std::move(es));
          }
          return Value::real(l.as_real() + r.as_real());
        case BinOp::Sub:
          if (l.kind() == ValueKind::Int && r.kind() == ValueKind::Int)
            return Value::integer(l.as_int() - r.as_int());
          return Value::real(l.as_real() - r.as_real());
        case BinOp::Mul:
          if (l.kind() == ValueKind::Int && r.kind() == ValueKind::Int)
            return Value::integer(l.as_int() * r.as_int());
          return Value::real(l.as_real() * r.as_real());
        case BinOp::Div:
          if (l.kind() == ValueKind::Int && r.kind() == ValueKind::Int) {
            if (r.as_int() == 0)
              throw RuntimeError(RuntimeErrorKind::DivisionByZero, "division by zero");
            return Value::integer(l.as_int() / r.as_int());
          }
          if (r.as_real() == 0.0)
            throw RuntimeError(RuntimeErrorKind::DivisionByZero, "division by zero");
          return Value::real(l.as_real() / r.as_real());
        case BinOp::Mod:
          if (r.as_int() == 0)
            throw RuntimeError(RuntimeErrorKind::DivisionByZero, "modulo by zero");
          return Value::integer(l.as_int() % r.as_int());
        case BinOp::In: {
          for (const auto& v : r.elements())
            if (v.compare(l) == 0) return Value::boolean(true);
          return Value::boolean(false);
        }
        case BinOp::Union: {
          std::vector<Value> es = l.elements();
          for (const auto& v : r.elements()) es.push_back(v);
          return Value::set(std::move(es));
        }
        case BinOp::SetMinus: {
          std::vector<Value> out;
          for (const auto& v : l.elements()) {
            bool drop = false;
            for (const auto& w : r.elements())
              if (w.compare(v) == 0) {
                drop = true;
                break;
              }
            if (!drop) out.push_back(v);
          }
          return Value::set(std::move(out));
        }
        default: break;
      }
      throw RuntimeError(RuntimeErrorKind::TypeMismatch, "unsupported binary operation");
    }
    case ExprKind::SetLit: {
      std::vector<Value> es;
      for (const auto& a : e->args) es.push_back(eval_expr(a, ctx));
      return Value::set(std::move(es));
    }
    case ExprKind::ListLit: {
      std::vector<Value> es;
      for (const auto& a : e->args) es.push_back(eval_expr(a, ctx));
      return Value::list(std::move(es));
    }
    case ExprKind::TupleLit: {
      // positional composite construction; typed record chosen by field count
      std::vector<Value> es;
      for (const auto& a : e->args) es.push_back(eval_expr(a, ctx));
      std::string type_name;
      std::vector<std::pair<std::string, Value>> fields;
      if (ctx.spec) {
        for (const auto& c : ctx.spec->composites) {
          if (c.fields.size() == es.size()) {
            type_name = c.name;
            for (std::size_t i = 0; i < es.size(); ++i)
              fields.emplace_back(c.fields[i].first, es[i]);
            break;
          }
        }
      }
      if (fields.empty())
        for (std::size_t i = 0; i < es.size(); ++i)
          fields.emplace_back("f" + std::to_string(i), es[i]);
      return Value::record(type_name, std::move(fields));
    }
    case ExprKind::SetComp: {
      std::int64_t lo = eval_expr(e->range_lo, ctx).as_int();
      std::int64_t hi = eval_expr(e->range_hi, ctx).as_int();
      std::vector<Value> es;
      for (std::int64_t i = lo; i <= hi; ++i) {
        std::map<std::string, Value> saved;
        std::map<std::string, Value> fresh;
        std::map<std::string, Value>* locals = ctx.locals ? ctx.locals : &fresh;
        auto prev = locals->find(e->bound_var);
        bool had = prev != locals->end();
        Value old = had ? prev->second : Value();
        (*locals)[e->bound_var] = Value::integer(i);
        EvalContext inner = ctx;
        inner.locals = locals;
        bool keep = eval_expr(e->body, inner).as_bool();
        if (had)
          (*locals)[e->bound_var] = old;
        else
          locals->erase(e->bound_var);
        if (keep) es.push_back(Value::integer(i));
        (void)saved;
      }
      return Value::set(std::move(es));
    }
    case ExprKind::SetMap: {
      std::vector<Value> out;
      auto emit = [&](const Value& bound) {
        std::map<std::string, Value> fresh;
        std::map<std::string, Value>* locals = ctx.locals ? ctx.locals : &fresh;
        auto prev = locals->find(e->bound_var);
        bool had = prev != locals->end();
        Value old = had ? prev->second : Value();
        (*locals)[e->bound_var] = bound;
        EvalContext inner = ctx;
        inner.locals = locals;
        for (const auto& elem : e->args) out.push_back(eval_expr(elem, inner));
        if (had)
          (*locals)[e->bound_var] = old;
        else
          locals->erase(e->bound_var);
      };
      if (e->source) {
        Value src = eval_expr(e->source, ctx);
        for (const auto& v : src.elements()) emit(v);
      } else {
        std::int64_t lo = eval_expr(e->range_lo, ctx).as_int();
        std::int64_t hi = eval_expr(e->range_hi, ctx).as_int();
        for (std::int64_t i = lo; i <= hi; ++i) emit(Value::integer(i));
      }
      return Value::set(std::move(out));
    }
    case ExprKind::Forall: {
      std::int64_t lo = eval_expr(e->range_lo, ctx).as_int();
      std::int64_t hi = eval_expr(e->range_hi, ctx).as_int();
      for (std::int64_t i = lo; i <= hi; ++i) {
        std::map<std::string, Value> fresh;
        std::map<std::string, Value>* locals = ctx.locals ? ctx.locals : &fresh;
        auto prev = locals->find(e->bound_var);
        bool had = prev != locals->end();
        Value old = had ? prev->second : Value();
        (*locals)[e->bound_var] = Value::integer(i);
        EvalContext inner = ctx;
        inner.locals = locals;
        bool ok = eval_expr(e->body, inner).as_bool();
        if (had)
          (*locals)[e->bound_var] = old;
        else
          locals->erase(e->bound_var);
        if (!ok) return Value::boolean(false);
      }
      return Value::boolean(true);
    }
  }
  throw RuntimeError(RuntimeErrorKind::TypeMismatch, "unhandled expression kind");
}

bool eval_bool(const ExprPtr& e, EvalContext& ctx) { return eval_expr(e, ctx).as_bool(); }

std::string eval_symbol_path(const ExprPtr& e, EvalContext& ctx) {
  switch (e->kind) {
    case ExprKind::Ident: {
      if (ctx.symbol_bindings) {
        auto it = ctx.symbol_bindings->find(e->str_val);
        if (it != ctx.symbol_bindings->end()) return it->second;
      }
      return e->str_val;
    }
    case ExprKind::Field: {
      // the base may evaluate to an object handle (r bound to r[2])
      if (e->base->kind == ExprKind::Ident || e->base->kind == ExprKind::Index ||
          e->base->kind == ExprKind::Field) {
        std::string base = eval_symbol_path(e->base, ctx);
        return base + "." + e->str_val;
      }
      Value b = eval_expr(e->base, ctx);
      if (b.kind() == ValueKind::Object) return b.object_handle() + "." + e->str_val;
      throw RuntimeError(RuntimeErrorKind::TypeMismatch, "not a symbol path");
    }
    case ExprKind::Index: {
      std::string base = eval_symbol_path(e->base, ctx);
      Value idx = eval_expr(e->args[0], ctx);
      return base + "[" + std::to_string(idx.as_int()) + "]";
    }
    default:
      throw RuntimeError(RuntimeErrorKind::TypeMismatch,
                         "expression is not a symbol path: " + expr_str(e));
  }
}

std::set<std::string> eval_symbol_set(const ExprPtr& e, EvalContext& ctx) {
  std::set<std::string> out;
  if (!e) return out;
  switch (e->kind) {
    case ExprKind::SetLit:
      for (const auto& a : e->args) out.insert(eval_symbol_path(a, ctx));
      return out;
    case ExprKind::SetMap: {
      auto emit = [&](const Value& bound) {
        std::map<std::string, Value> fresh;
        std::map<std::string, Value>* locals = ctx.locals ? ctx.locals : &fresh;
        auto prev = locals->find(e->bound_var);
        bool had = prev != locals->end();
        Value old = had ? prev->second : Value();
        (*locals)[e->bound_var] = bound;
        EvalContext inner = ctx;
        inner.locals = locals;
        for (const auto& elem : e->args) out.insert(eval_symbol_path(elem, inner));
        if (had)
          (*locals)[e->bound_var] = old;
        else
          locals->erase(e->bound_var);
      };
      if (e->source) {
        Value src = eval_expr(e->source, ctx);
        for (const auto& v : src.elements()) emit(v);
      } else {
        std::int64_t lo = eval_expr(e->range_lo, ctx).as_int();
        std::int64_t hi = eval_expr(e->range_hi, ctx).as_int();
        for (std::int64_t i = lo; i <= hi; ++i) emit(Value::integer(i));
      }
      return out;
    }
    case ExprKind::Binary:
      if (e->bin_op == BinOp::Union) {
        out = eval_symbol_set(e->args[0], ctx);
        for (auto& s : eval_symbol_set(e->args[1], ctx)) out.insert(s);
        return out;
      }
      if (e->bin_op == BinOp::SetMinus) {
        out = eval_symbol_set(e->args[0], ctx);
        for (auto& s : eval_symbol_set(e->args[1], ctx)) out.erase(s);
        return out;
      }
      break;
    default: break;
  }
  throw RuntimeError(RuntimeErrorKind::TypeMismatch,
                     "frame expression must be a set of object parameters");
}

Value default_value(const TypePtr& t, const Specification& spec,
                    const std::map<std::string, Value>& consts) {
  if (!t) return Value::null();
  switch (t->kind) {
    case TypeKind::Bool: return Value::boolean(false);
    case TypeKind::Int:
    case TypeKind::Nat: return Value::integer(0);
    case TypeKind::Real: return Value::real(0.0);
    case TypeKind::Token: return Value::token("");
    case TypeKind::EnumRef: {
      const EnumDecl* e = spec.find_enum(t->name);
      if (e && !e->literals.empty()) return Value::enum_lit(e->name, 0, e->literals[0]);
      return Value::null();
    }
    case TypeKind::CompositeRef: {
      const CompositeDecl* c = spec.find_composite(t->name);
      if (!c) return Value::null();
      std::vector<std::pair<std::string, Value>> fields;
      for (const auto& f : c->fields)
        fields.emplace_back(f.first, default_value(f.second, spec, consts));
      return Value::record(c->name, std::move(fields));
    }
    case TypeKind::Array: {
      std::size_t n = 0;
      if (t->size) {
        std::map<std::string, Value> locals;
        EvalContext ctx;
        ctx.consts = &consts;
        ctx.locals = &locals;
        ctx.spec = &spec;
        try {
          n = static_cast<std::size_t>(eval_expr(t->size, ctx).as_int());
        } catch (const RuntimeError&) {
          n = 0;
        }
      }
      std::vector<Value> es(n, default_value(t->elem, spec, consts));
      return Value::array(std::move(es));
    }
    case TypeKind::List: return Value::list({});
    case TypeKind::Set: return Value::set({});
    case TypeKind::ObjectRef:
    case TypeKind::Collaboration: return Value::null();
  }
  return Value::null();
}

namespace {

// shapes a bound value to its declared type: list literals become arrays,
// integers widen to reals
Value coerce_to_type(Value v, const TypePtr& t) {
  if (!t) return v;
  if (t->kind == TypeKind::Real && v.kind() == ValueKind::Int)
    return Value::real(static_cast<double>(v.as_int()));
  if (t->kind == TypeKind::Array && v.kind() == ValueKind::List) {
    std::vector<Value> es;
    for (const auto& e : v.elements()) es.push_back(coerce_to_type(e, t->elem));
    return Value::array(std::move(es));
  }
  if ((t->kind == TypeKind::Array || t->kind == TypeKind::List) &&
      (v.kind() == ValueKind::Array || v.kind() == ValueKind::List)) {
    std::vector<Value> es;
    for (const auto& e : v.elements()) es.push_back(coerce_to_type(e, t->elem));
    return t->kind == TypeKind::Array ? Value::array(std::move(es))
                                      : Value::list(std::move(es));
  }
  return v;
}

} // namespace

Diagnostics bind_constants(const Specification& spec,
                           const std::map<std::string, Value>& overrides,
                           std::map<std::string, Value>& out) {
  Diagnostics diags;
  for (const auto& c : spec.constants.entries) {
    auto ov = overrides.find(c.name);
    if (ov != overrides.end()) {
      out[c.name] = coerce_to_type(ov->second, c.type);
      continue;
    }
    if (!c.init) continue;  // value-less constants stay unbound
    EvalContext ctx;
    std::map<std::string, Value> locals;
    ctx.consts = &out;
    ctx.locals = &locals;
    ctx.spec = &spec;
    try {
      out[c.name] = coerce_to_type(eval_expr(c.init, ctx), c.type);
    } catch (const RuntimeError& err) {
      diags.push_back(Diagnostic::error(
          "cannot evaluate initializer of constant '" + c.name + "': " + err.what(), c.span));
    }
  }
  return diags;
}

// ---------------------------------------------------------------------------
// Action execution

namespace {

bool frame_allows(EvalContext& ctx, const std::string& path) {
  if (!ctx.locals) return false;
  auto it = ctx.locals->find("frame");
  if (it == ctx.locals->end()) return false;
  if (it->second.kind() != ValueKind::Set) return false;
  for (const auto& v : it->second.elements())
    if (v.kind() == ValueKind::Token && v.token_value() == path) return true;
  return false;
}

// Root identifier of an assignment target path.
const Expr* path_root(const ExprPtr& e) {
  const Expr* cur = e.get();
  while (cur && (cur->kind == ExprKind::Field || cur->kind == ExprKind::Index))
    cur = cur->base.get();
  return cur;
}

void assign_into(Value& target, const ExprPtr& path, const ExprPtr& root, const Value& v,
                 EvalContext& ctx) {
  if (path.get() == root.get() || path->kind == ExprKind::Ident) {
    target = v;
    return;
  }
  if (path->kind == ExprKind::Index) {
    // resolve the container in place
    std::function<Value*(const ExprPtr&)> locate = [&](const ExprPtr& p) -> Value* {
      if (p->kind == ExprKind::Ident) return &target;
      if (p->kind == ExprKind::Index) {
        Value* base = locate(p->base);
        if (!base) return nullptr;
        std::int64_t i = eval_expr(p->args[0], ctx).as_int();
        auto& es = base->mutable_elements();
        if (i < 0 || static_cast<std::size_t>(i) >= es.size()) {
          // auto-extend local arrays on first write past the end
          es.resize(static_cast<std::size_t>(i) + 1);
        }
        return &es[static_cast<std::size_t>(i)];
      }
      return nullptr;
    };
    Value* slot = locate(path);
    if (!slot)
      throw RuntimeError(RuntimeErrorKind::TypeMismatch, "unsupported assignment target");
    *slot = v;
    return;
  }
  throw RuntimeError(RuntimeErrorKind::TypeMismatch, "unsupported assignment target");
}

void exec_stmt(const StmtPtr& st, EvalContext& ctx,
               const std::set<std::string>& object_param_roots, ActionEffects& effects);

void exec_block(const ActionBlock& block, EvalContext& ctx,
                const std::set<std::string>& roots, ActionEffects& effects) {
  for (const auto& st : block) exec_stmt(st, ctx, roots, effects);
}

void exec_stmt(const StmtPtr& st, EvalContext& ctx,
               const std::set<std::string>& object_param_roots, ActionEffects& effects) {
  switch (st->kind) {
    case StmtKind::Assign: {
      const Expr* root = path_root(st->lhs);
      if (!root || root->kind != ExprKind::Ident)
        throw RuntimeError(RuntimeErrorKind::TypeMismatch, "unsupported assignment target");
      const std::string& root_name = root->str_val;

      if (root_name == "EoT") {
        Value v = eval_expr(st->rhs, ctx);
        if (v.as_bool()) effects.eot_requested = true;
        return;
      }
      if (root_name == "frame" && st->lhs->kind == ExprKind::Ident) {
        std::set<std::string> paths = eval_symbol_set(st->rhs, ctx);
        std::vector<Value> tokens;
        for (const auto& p : paths) tokens.push_back(Value::token(p));
        (*ctx.locals)["frame"] = Value::set(std::move(tokens));
        return;
      }
      bool is_object_write = object_param_roots.count(root_name) > 0 ||
                             (ctx.symbol_bindings && ctx.symbol_bindings->count(root_name) > 0);
      if (is_object_write) {
        std::string path = eval_symbol_path(st->lhs, ctx);
        Value v = eval_expr(st->rhs, ctx);
        if (!frame_allows(ctx, path))
          throw RuntimeError(RuntimeErrorKind::FrameViolation,
                             "write to '" + path + "' outside frame");
        effects.symbol_writes[path] = std::move(v);
        return;
      }
      // auxiliary variable: visible immediately within the block (and to the
      // engine, which publishes locals at the end of the tick)
      Value v = eval_expr(st->rhs, ctx);
      if (st->lhs->kind == ExprKind::Ident) {
        (*ctx.locals)[root_name] = std::move(v);
      } else {
        auto it = ctx.locals->find(root_name);
        if (it == ctx.locals->end()) {
          (*ctx.locals)[root_name] = Value::array({});
          it = ctx.locals->find(root_name);
        }
        ExprPtr root_ptr = Expr::ident(root_name);
        assign_into(it->second, st->lhs, root_ptr, v, ctx);
      }
      return;
    }
    case StmtKind::If: {
      if (eval_bool(st->cond, ctx))
        exec_block(st->then_body, ctx, object_param_roots, effects);
      else
        exec_block(st->else_body, ctx, object_param_roots, effects);
      return;
    }
    case StmtKind::Foreach: {
      Value src = eval_expr(st->loop_source, ctx);
      for (const auto& v : src.elements()) {
        auto prev = ctx.locals->find(st->loop_var);
        bool had = prev != ctx.locals->end();
        Value old = had ? prev->second : Value();
        (*ctx.locals)[st->loop_var] = v;
        exec_block(st->loop_body, ctx, object_param_roots, effects);
        if (had)
          (*ctx.locals)[st->loop_var] = old;
        else
          ctx.locals->erase(st->loop_var);
      }
      return;
    }
    case StmtKind::CollDelete: {
      Value target = eval_expr(st->lhs, ctx);
      ActionEffects::Mutation m;
      m.kind = ActionEffects::Mutation::Kind::Delete;
      if (target.kind() == ValueKind::Object)
        m.target = target.object_handle();
      else if (target.is_null())
        return;  // delete of an already-null reference is a no-op
      else
        throw RuntimeError(RuntimeErrorKind::TypeMismatch, "delete of a non-object");
      effects.mutations.push_back(std::move(m));
      return;
    }
    case StmtKind::CollCreateObject: {
      ActionEffects::Mutation m;
      m.kind = ActionEffects::Mutation::Kind::CreateObject;
      m.target = st->create_name;
      if (st->create_index) {
        std::int64_t i = eval_expr(st->create_index, ctx).as_int();
        m.target += "[" + std::to_string(i) + "]";
      }
      m.type_name = st->create_type ? st->create_type->name : "";
      effects.mutations.push_back(std::move(m));
      return;
    }
    case StmtKind::CollCreateInterface: {
      ActionEffects::Mutation m;
      m.kind = ActionEffects::Mutation::Kind::CreateInterface;
      m.iface_name = st->create_name;
      if (st->create_index) {
        std::int64_t i = eval_expr(st->create_index, ctx).as_int();
        m.iface_name += "[" + std::to_string(i) + "]";
      }
      m.iface_from = eval_symbol_path(st->iface_from, ctx);
      m.iface_to = eval_symbol_path(st->iface_to, ctx);
      effects.mutations.push_back(std::move(m));
      return;
    }
  }
}

} // namespace

void exec_actions(const ActionBlock& block, EvalContext& ctx,
                  const std::set<std::string>& object_param_roots, ActionEffects& effects) {
  exec_block(block, ctx, object_param_roots, effects);
}

} // namespace scsl
