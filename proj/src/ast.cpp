#include "scsl/ast.hpp"

#include <functional>
#include <sstream>

namespace scsl {

std::string SourceSpan::str() const {
  std::ostringstream os;
  os << (file.empty() ? "<input>" : file) << ":" << start_line << ":" << start_col;
  return os.str();
}

std::string Diagnostic::str() const {
  std::ostringstream os;
  os << span.str() << ": " << (severity == Severity::Error ? "error" : "warning")
     << ": " << message;
  return os.str();
}

bool has_errors(const Diagnostics& diags) {
  for (const auto& d : diags)
    if (d.severity == Severity::Error) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Types

TypePtr TypeExpr::make(TypeKind k) {
  auto t = std::make_shared<TypeExpr>();
  t->kind = k;
  return t;
}

TypePtr TypeExpr::named(TypeKind k, std::string name) {
  auto t = std::make_shared<TypeExpr>();
  t->kind = k;
  t->name = std::move(name);
  return t;
}

TypePtr TypeExpr::array_of(TypePtr elem, ExprPtr size) {
  auto t = std::make_shared<TypeExpr>();
  t->kind = TypeKind::Array;
  t->elem = std::move(elem);
  t->size = std::move(size);
  return t;
}

TypePtr TypeExpr::list_of(TypePtr elem) {
  auto t = std::make_shared<TypeExpr>();
  t->kind = TypeKind::List;
  t->elem = std::move(elem);
  return t;
}

TypePtr TypeExpr::set_of(TypePtr elem) {
  auto t = std::make_shared<TypeExpr>();
  t->kind = TypeKind::Set;
  t->elem = std::move(elem);
  return t;
}

bool type_equal(const TypePtr& a, const TypePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) {
    // nat/int interchange freely in structural positions
    auto widen = [](TypeKind k) { return k == TypeKind::Nat ? TypeKind::Int : k; };
    if (widen(a->kind) != widen(b->kind)) return false;
  }
  if (a->name != b->name) return false;
  if (!type_equal(a->elem, b->elem)) return false;
  return true;  // array sizes compared dynamically
}

std::string type_str(const TypePtr& t) {
  if (!t) return "<none>";
  switch (t->kind) {
    case TypeKind::Bool: return "bool";
    case TypeKind::Int: return "int";
    case TypeKind::Nat: return "nat";
    case TypeKind::Real: return "real";
    case TypeKind::Token: return "ItemId";
    case TypeKind::EnumRef:
    case TypeKind::CompositeRef:
    case TypeKind::ObjectRef: return t->name;
    case TypeKind::Array: {
      std::string s = type_str(t->elem) + "[";
      if (t->size) s += expr_str(t->size);
      return s + "]";
    }
    case TypeKind::List: return "list of " + type_str(t->elem);
    case TypeKind::Set: return "set of " + type_str(t->elem);
    case TypeKind::Collaboration: return "collaboration";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Expressions

static ExprPtr mk(ExprKind k, SourceSpan sp) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->span = std::move(sp);
  return e;
}

ExprPtr Expr::make_bool(bool v, SourceSpan sp) {
  auto e = std::const_pointer_cast<Expr>(mk(ExprKind::BoolLit, std::move(sp)));
  e->bool_val = v;
  return e;
}
ExprPtr Expr::make_int(std::int64_t v, SourceSpan sp) {
  auto e = std::const_pointer_cast<Expr>(mk(ExprKind::IntLit, std::move(sp)));
  e->int_val = v;
  return e;
}
ExprPtr Expr::make_real(double v, SourceSpan sp) {
  auto e = std::const_pointer_cast<Expr>(mk(ExprKind::RealLit, std::move(sp)));
  e->real_val = v;
  return e;
}
ExprPtr Expr::make_string(std::string v, SourceSpan sp) {
  auto e = std::const_pointer_cast<Expr>(mk(ExprKind::StringLit, std::move(sp)));
  e->str_val = std::move(v);
  return e;
}
ExprPtr Expr::make_null(SourceSpan sp) { return mk(ExprKind::NullLit, std::move(sp)); }
ExprPtr Expr::ident(std::string name, SourceSpan sp) {
  auto e = std::const_pointer_cast<Expr>(mk(ExprKind::Ident, std::move(sp)));
  e->str_val = std::move(name);
  return e;
}
ExprPtr Expr::field(ExprPtr base, std::string name, SourceSpan sp) {
  auto e = std::const_pointer_cast<Expr>(mk(ExprKind::Field, std::move(sp)));
  e->base = std::move(base);
  e->str_val = std::move(name);
  return e;
}
ExprPtr Expr::index(ExprPtr base, ExprPtr idx, SourceSpan sp) {
  auto e = std::const_pointer_cast<Expr>(mk(ExprKind::Index, std::move(sp)));
  e->base = std::move(base);
  e->args.push_back(std::move(idx));
  return e;
}
ExprPtr Expr::call(std::string callee, std::vector<ExprPtr> args, SourceSpan sp) {
  auto e = std::const_pointer_cast<Expr>(mk(ExprKind::Call, std::move(sp)));
  e->str_val = std::move(callee);
  e->args = std::move(args);
  return e;
}
ExprPtr Expr::unary(UnOp op, ExprPtr x, SourceSpan sp) {
  auto e = std::const_pointer_cast<Expr>(mk(ExprKind::Unary, std::move(sp)));
  e->un_op = op;
  e->args.push_back(std::move(x));
  return e;
}
ExprPtr Expr::binary(BinOp op, ExprPtr l, ExprPtr r, SourceSpan sp) {
  auto e = std::const_pointer_cast<Expr>(mk(ExprKind::Binary, std::move(sp)));
  e->bin_op = op;
  e->args.push_back(std::move(l));
  e->args.push_back(std::move(r));
  return e;
}
ExprPtr Expr::set_lit(std::vector<ExprPtr> elems, SourceSpan sp) {
  auto e = std::const_pointer_cast<Expr>(mk(ExprKind::SetLit, std::move(sp)));
  e->args = std::move(elems);
  return e;
}
ExprPtr Expr::list_lit(std::vector<ExprPtr> elems, SourceSpan sp) {
  auto e = std::const_pointer_cast<Expr>(mk(ExprKind::ListLit, std::move(sp)));
  e->args = std::move(elems);
  return e;
}
ExprPtr Expr::tuple_lit(std::vector<ExprPtr> elems, SourceSpan sp) {
  auto e = std::const_pointer_cast<Expr>(mk(ExprKind::TupleLit, std::move(sp)));
  e->args = std::move(elems);
  return e;
}
ExprPtr Expr::set_comp(std::string var, ExprPtr lo, ExprPtr hi, ExprPtr pred, SourceSpan sp) {
  auto e = std::const_pointer_cast<Expr>(mk(ExprKind::SetComp, std::move(sp)));
  e->bound_var = std::move(var);
  e->range_lo = std::move(lo);
  e->range_hi = std::move(hi);
  e->body = std::move(pred);
  return e;
}
ExprPtr Expr::set_map(std::vector<ExprPtr> elems, std::string var, ExprPtr source,
                      ExprPtr lo, ExprPtr hi, SourceSpan sp) {
  auto e = std::const_pointer_cast<Expr>(mk(ExprKind::SetMap, std::move(sp)));
  e->args = std::move(elems);
  e->bound_var = std::move(var);
  e->source = std::move(source);
  e->range_lo = std::move(lo);
  e->range_hi = std::move(hi);
  return e;
}
ExprPtr Expr::forall(std::string var, ExprPtr lo, ExprPtr hi, ExprPtr body, SourceSpan sp) {
  auto e = std::const_pointer_cast<Expr>(mk(ExprKind::Forall, std::move(sp)));
  e->bound_var = std::move(var);
  e->range_lo = std::move(lo);
  e->range_hi = std::move(hi);
  e->body = std::move(body);
  return e;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::BoolLit: if (a->bool_val != b->bool_val) return false; break;
    case ExprKind::IntLit: if (a->int_val != b->int_val) return false; break;
    case ExprKind::RealLit: if (a->real_val != b->real_val) return false; break;
    case ExprKind::StringLit:
    case ExprKind::Ident: if (a->str_val != b->str_val) return false; break;
    case ExprKind::NullLit: break;
    case ExprKind::Field:
      if (a->str_val != b->str_val || !expr_equal(a->base, b->base)) return false;
      break;
    case ExprKind::Index:
      if (!expr_equal(a->base, b->base)) return false;
      break;
    case ExprKind::Call: if (a->str_val != b->str_val) return false; break;
    case ExprKind::Unary: if (a->un_op != b->un_op) return false; break;
    case ExprKind::Binary: if (a->bin_op != b->bin_op) return false; break;
    default: break;
  }
  if (a->args.size() != b->args.size()) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!expr_equal(a->args[i], b->args[i])) return false;
  if (a->bound_var != b->bound_var) return false;
  if (!expr_equal(a->range_lo, b->range_lo)) return false;
  if (!expr_equal(a->range_hi, b->range_hi)) return false;
  if (!expr_equal(a->source, b->source)) return false;
  if (!expr_equal(a->body, b->body)) return false;
  return true;
}

std::size_t expr_hash(const ExprPtr& e) {
  if (!e) return 0x9e3779b9;
  std::size_t h = static_cast<std::size_t>(e->kind) * 0x100000001b3ull;
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2); };
  switch (e->kind) {
    case ExprKind::BoolLit: mix(e->bool_val ? 1 : 2); break;
    case ExprKind::IntLit: mix(std::hash<std::int64_t>{}(e->int_val)); break;
    case ExprKind::RealLit: mix(std::hash<double>{}(e->real_val)); break;
    default: mix(std::hash<std::string>{}(e->str_val)); break;
  }
  mix(static_cast<std::size_t>(e->bin_op));
  mix(static_cast<std::size_t>(e->un_op));
  mix(expr_hash(e->base));
  for (const auto& a : e->args) mix(expr_hash(a));
  mix(std::hash<std::string>{}(e->bound_var));
  mix(expr_hash(e->range_lo));
  mix(expr_hash(e->range_hi));
  mix(expr_hash(e->source));
  mix(expr_hash(e->body));
  return h;
}

namespace {

int bin_prec(BinOp op) {
  switch (op) {
    case BinOp::Iff: return 1;
    case BinOp::Implies: return 2;
    case BinOp::Or: return 3;
    case BinOp::And: return 4;
    case BinOp::Eq: case BinOp::Ne: case BinOp::Lt: case BinOp::Le:
    case BinOp::Gt: case BinOp::Ge: case BinOp::In: return 5;
    case BinOp::Union: case BinOp::SetMinus: return 6;
    case BinOp::Add: case BinOp::Sub: return 7;
    case BinOp::Mul: case BinOp::Div: case BinOp::Mod: return 8;
  }
  return 9;
}

const char* bin_sym(BinOp op) {
  switch (op) {
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
    case BinOp::Implies: return "=>";
    case BinOp::Iff: return "<=>";
    case BinOp::Eq: return "=";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::In: return "in";
    case BinOp::Union: return "union";
    case BinOp::SetMinus: return "\\";
  }
  return "?";
}

void render_expr(const ExprPtr& e, std::ostringstream& os, int parent_prec);

void render_list(const std::vector<ExprPtr>& es, std::ostringstream& os) {
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (i) os << ", ";
    render_expr(es[i], os, 0);
  }
}

void render_expr(const ExprPtr& e, std::ostringstream& os, int parent_prec) {
  if (!e) { os << "<null>"; return; }
  switch (e->kind) {
    case ExprKind::BoolLit: os << (e->bool_val ? "true" : "false"); return;
    case ExprKind::IntLit: os << e->int_val; return;
    case ExprKind::RealLit: {
      std::ostringstream t;
      t << e->real_val;
      std::string s = t.str();
      os << s;
      if (s.find('.') == std::string::npos && s.find('e') == std::string::npos) os << ".0";
      return;
    }
    case ExprKind::StringLit: os << '"' << e->str_val << '"'; return;
    case ExprKind::NullLit: os << "null"; return;
    case ExprKind::Ident: os << e->str_val; return;
    case ExprKind::Field:
      render_expr(e->base, os, 10);
      os << "." << e->str_val;
      return;
    case ExprKind::Index:
      render_expr(e->base, os, 10);
      os << "[";
      render_expr(e->args[0], os, 0);
      os << "]";
      return;
    case ExprKind::Call:
      os << e->str_val << "(";
      render_list(e->args, os);
      os << ")";
      return;
    case ExprKind::Unary:
      if (e->un_op == UnOp::Card) { os << "#"; render_expr(e->args[0], os, 10); return; }
      os << (e->un_op == UnOp::Not ? "!" : "-");
      render_expr(e->args[0], os, 9);
      return;
    case ExprKind::Binary: {
      int p = bin_prec(e->bin_op);
      bool paren = p < parent_prec;
      if (paren) os << "(";
      render_expr(e->args[0], os, p);
      os << " " << bin_sym(e->bin_op) << " ";
      render_expr(e->args[1], os, p + 1);
      if (paren) os << ")";
      return;
    }
    case ExprKind::SetLit:
      os << "{";
      render_list(e->args, os);
      os << "}";
      return;
    case ExprKind::ListLit:
      os << "[";
      render_list(e->args, os);
      os << "]";
      return;
    case ExprKind::TupleLit:
      os << "(";
      render_list(e->args, os);
      os << ")";
      return;
    case ExprKind::SetComp:
      os << "{ " << e->bound_var << " : ";
      render_expr(e->range_lo, os, 0);
      os << "..";
      render_expr(e->range_hi, os, 0);
      os << " | ";
      render_expr(e->body, os, 0);
      os << " }";
      return;
    case ExprKind::SetMap:
      os << "{ ";
      render_list(e->args, os);
      os << " | " << e->bound_var;
      if (e->source) {
        os << " in ";
        render_expr(e->source, os, 0);
      } else {
        os << " : ";
        render_expr(e->range_lo, os, 0);
        os << "..";
        render_expr(e->range_hi, os, 0);
      }
      os << " }";
      return;
    case ExprKind::Forall:
      if (parent_prec > 0) os << "(";
      os << "forall " << e->bound_var << " : ";
      render_expr(e->range_lo, os, 0);
      os << "..";
      render_expr(e->range_hi, os, 0);
      os << " . ";
      render_expr(e->body, os, 0);
      if (parent_prec > 0) os << ")";
      return;
  }
}

} // namespace

std::string expr_str(const ExprPtr& e) {
  std::ostringstream os;
  render_expr(e, os, 0);
  return os.str();
}

ExprPtr expr_subst(const ExprPtr& e, const std::map<std::string, ExprPtr>& subst) {
  if (!e || subst.empty()) return e;
  switch (e->kind) {
    case ExprKind::Ident: {
      auto it = subst.find(e->str_val);
      return it != subst.end() ? it->second : e;
    }
    case ExprKind::BoolLit: case ExprKind::IntLit: case ExprKind::RealLit:
    case ExprKind::StringLit: case ExprKind::NullLit:
      return e;
    default: break;
  }
  auto copy = std::make_shared<Expr>(*e);
  // bound variable shadows outer substitutions
  std::map<std::string, ExprPtr> inner = subst;
  if (!e->bound_var.empty()) inner.erase(e->bound_var);
  copy->base = expr_subst(e->base, subst);
  for (auto& a : copy->args) a = expr_subst(a, subst);
  copy->range_lo = expr_subst(e->range_lo, subst);
  copy->range_hi = expr_subst(e->range_hi, subst);
  copy->source = expr_subst(e->source, inner);
  copy->body = expr_subst(e->body, inner);
  return copy;
}

// ---------------------------------------------------------------------------
// LTL

static LtlPtr lmk(LtlKind k) {
  auto f = std::make_shared<LtlFormula>();
  f->kind = k;
  return f;
}

LtlPtr LtlFormula::make_atom(ExprPtr e, SourceSpan sp) {
  auto f = std::const_pointer_cast<LtlFormula>(lmk(LtlKind::Atom));
  f->atom = std::move(e);
  f->span = std::move(sp);
  return f;
}
LtlPtr LtlFormula::make_not(LtlPtr x) { auto f = std::const_pointer_cast<LtlFormula>(lmk(LtlKind::Not)); f->lhs = std::move(x); return f; }
LtlPtr LtlFormula::make_and(LtlPtr l, LtlPtr r) { auto f = std::const_pointer_cast<LtlFormula>(lmk(LtlKind::And)); f->lhs = std::move(l); f->rhs = std::move(r); return f; }
LtlPtr LtlFormula::make_or(LtlPtr l, LtlPtr r) { auto f = std::const_pointer_cast<LtlFormula>(lmk(LtlKind::Or)); f->lhs = std::move(l); f->rhs = std::move(r); return f; }
LtlPtr LtlFormula::implies(LtlPtr l, LtlPtr r) { auto f = std::const_pointer_cast<LtlFormula>(lmk(LtlKind::Implies)); f->lhs = std::move(l); f->rhs = std::move(r); return f; }
LtlPtr LtlFormula::iff(LtlPtr l, LtlPtr r) { auto f = std::const_pointer_cast<LtlFormula>(lmk(LtlKind::Iff)); f->lhs = std::move(l); f->rhs = std::move(r); return f; }
LtlPtr LtlFormula::next(LtlPtr x) { auto f = std::const_pointer_cast<LtlFormula>(lmk(LtlKind::Next)); f->lhs = std::move(x); return f; }
LtlPtr LtlFormula::until(LtlPtr l, LtlPtr r) { auto f = std::const_pointer_cast<LtlFormula>(lmk(LtlKind::Until)); f->lhs = std::move(l); f->rhs = std::move(r); return f; }
LtlPtr LtlFormula::finally_(LtlPtr x) { auto f = std::const_pointer_cast<LtlFormula>(lmk(LtlKind::Finally)); f->lhs = std::move(x); return f; }
LtlPtr LtlFormula::globally(LtlPtr x) { auto f = std::const_pointer_cast<LtlFormula>(lmk(LtlKind::Globally)); f->lhs = std::move(x); return f; }

bool ltl_equal(const LtlPtr& a, const LtlPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  if (a->kind == LtlKind::Atom) return expr_equal(a->atom, b->atom);
  return ltl_equal(a->lhs, b->lhs) && ltl_equal(a->rhs, b->rhs);
}

std::string ltl_str(const LtlPtr& f) {
  if (!f) return "<null>";
  switch (f->kind) {
    case LtlKind::Atom: {
      std::string s = expr_str(f->atom);
      // parenthesize compound atoms for readability
      if (f->atom && (f->atom->kind == ExprKind::Binary || f->atom->kind == ExprKind::Forall))
        return "(" + s + ")";
      return s;
    }
    case LtlKind::Not: return "!" + ltl_str(f->lhs);
    case LtlKind::And: return "(" + ltl_str(f->lhs) + " && " + ltl_str(f->rhs) + ")";
    case LtlKind::Or: return "(" + ltl_str(f->lhs) + " || " + ltl_str(f->rhs) + ")";
    case LtlKind::Implies: return "(" + ltl_str(f->lhs) + " => " + ltl_str(f->rhs) + ")";
    case LtlKind::Iff: return "(" + ltl_str(f->lhs) + " <=> " + ltl_str(f->rhs) + ")";
    case LtlKind::Next: return "X " + ltl_str(f->lhs);
    case LtlKind::Until: return "(" + ltl_str(f->lhs) + " U " + ltl_str(f->rhs) + ")";
    case LtlKind::Finally: return "F " + ltl_str(f->lhs);
    case LtlKind::Globally: return "G " + ltl_str(f->lhs);
  }
  return "?";
}

LtlPtr ltl_subst(const LtlPtr& f, const std::map<std::string, ExprPtr>& subst) {
  if (!f || subst.empty()) return f;
  if (f->kind == LtlKind::Atom) return LtlFormula::make_atom(expr_subst(f->atom, subst), f->span);
  auto copy = std::make_shared<LtlFormula>(*f);
  copy->lhs = ltl_subst(f->lhs, subst);
  copy->rhs = ltl_subst(f->rhs, subst);
  return copy;
}

void ltl_atoms(const LtlPtr& f, std::vector<ExprPtr>& out) {
  if (!f) return;
  if (f->kind == LtlKind::Atom) {
    for (const auto& a : out)
      if (expr_equal(a, f->atom)) return;
    out.push_back(f->atom);
    return;
  }
  ltl_atoms(f->lhs, out);
  ltl_atoms(f->rhs, out);
}

// ---------------------------------------------------------------------------
// Specification lookups

const EnumDecl* Specification::find_enum(const std::string& name) const {
  for (const auto& e : enums)
    if (e.name == name) return &e;
  return nullptr;
}
const CompositeDecl* Specification::find_composite(const std::string& name) const {
  for (const auto& c : composites)
    if (c.name == name) return &c;
  return nullptr;
}
const ConstDecl* Specification::find_const(const std::string& name) const {
  for (const auto& c : constants.entries)
    if (c.name == name) return &c;
  return nullptr;
}
const FunctionDecl* Specification::find_function(const std::string& name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}
const ObjectTypeDecl* Specification::find_object_type(const std::string& name) const {
  for (const auto& o : object_types)
    if (o.name == name) return &o;
  return nullptr;
}
const ScenarioTypeDecl* Specification::find_scenario(const std::string& name) const {
  for (const auto& s : scenarios)
    if (s.name == name) return &s;
  return nullptr;
}
std::optional<std::pair<std::string, int>> Specification::find_enum_literal(
    const std::string& lit) const {
  for (const auto& e : enums)
    for (std::size_t i = 0; i < e.literals.size(); ++i)
      if (e.literals[i] == lit) return std::make_pair(e.name, static_cast<int>(i));
  return std::nullopt;
}

namespace {

bool stmt_equal(const StmtPtr& a, const StmtPtr& b);

bool block_equal(const ActionBlock& a, const ActionBlock& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!stmt_equal(a[i], b[i])) return false;
  return true;
}

bool stmt_equal(const StmtPtr& a, const StmtPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  return expr_equal(a->lhs, b->lhs) && expr_equal(a->rhs, b->rhs) &&
         expr_equal(a->cond, b->cond) && block_equal(a->then_body, b->then_body) &&
         block_equal(a->else_body, b->else_body) && a->loop_var == b->loop_var &&
         expr_equal(a->loop_source, b->loop_source) && block_equal(a->loop_body, b->loop_body) &&
         a->create_name == b->create_name && expr_equal(a->create_index, b->create_index) &&
         type_equal(a->create_type, b->create_type) && expr_equal(a->iface_from, b->iface_from) &&
         expr_equal(a->iface_to, b->iface_to);
}

bool schedule_equal(const SchedulePtr& a, const SchedulePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  if (a->scenario != b->scenario) return false;
  if (a->args.size() != b->args.size()) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!expr_equal(a->args[i], b->args[i])) return false;
  if (a->children.size() != b->children.size()) return false;
  for (std::size_t i = 0; i < a->children.size(); ++i)
    if (!schedule_equal(a->children[i], b->children[i])) return false;
  return a->var == b->var && expr_equal(a->lo, b->lo) && expr_equal(a->hi, b->hi) &&
         schedule_equal(a->body, b->body);
}

} // namespace

bool spec_equal(const Specification& a, const Specification& b) {
  if (a.enums.size() != b.enums.size()) return false;
  for (std::size_t i = 0; i < a.enums.size(); ++i)
    if (a.enums[i].name != b.enums[i].name || a.enums[i].literals != b.enums[i].literals)
      return false;

  if (a.composites.size() != b.composites.size()) return false;
  for (std::size_t i = 0; i < a.composites.size(); ++i) {
    const auto& x = a.composites[i];
    const auto& y = b.composites[i];
    if (x.name != y.name || x.fields.size() != y.fields.size()) return false;
    for (std::size_t j = 0; j < x.fields.size(); ++j)
      if (x.fields[j].first != y.fields[j].first ||
          !type_equal(x.fields[j].second, y.fields[j].second))
        return false;
  }

  if (a.constants.entries.size() != b.constants.entries.size()) return false;
  for (std::size_t i = 0; i < a.constants.entries.size(); ++i) {
    const auto& x = a.constants.entries[i];
    const auto& y = b.constants.entries[i];
    if (x.name != y.name || !type_equal(x.type, y.type) || !expr_equal(x.init, y.init))
      return false;
  }
  if (a.constants.constraints.size() != b.constants.constraints.size()) return false;
  for (std::size_t i = 0; i < a.constants.constraints.size(); ++i)
    if (!expr_equal(a.constants.constraints[i], b.constants.constraints[i])) return false;

  if (a.functions.size() != b.functions.size()) return false;
  for (std::size_t i = 0; i < a.functions.size(); ++i) {
    const auto& x = a.functions[i];
    const auto& y = b.functions[i];
    if (x.name != y.name || x.builtin != y.builtin || !expr_equal(x.body, y.body) ||
        !type_equal(x.result, y.result) || x.params.size() != y.params.size())
      return false;
    for (std::size_t j = 0; j < x.params.size(); ++j)
      if (x.params[j].first != y.params[j].first ||
          !type_equal(x.params[j].second, y.params[j].second))
        return false;
  }

  if (a.object_types.size() != b.object_types.size()) return false;
  for (std::size_t i = 0; i < a.object_types.size(); ++i) {
    const auto& x = a.object_types[i];
    const auto& y = b.object_types[i];
    if (x.name != y.name || x.cycletime != y.cycletime || x.auxiliary != y.auxiliary ||
        x.params.size() != y.params.size())
      return false;
    for (std::size_t j = 0; j < x.params.size(); ++j)
      if (x.params[j].dir != y.params[j].dir || x.params[j].name != y.params[j].name ||
          !type_equal(x.params[j].type, y.params[j].type))
        return false;
  }

  if (a.scenarios.size() != b.scenarios.size()) return false;
  for (std::size_t i = 0; i < a.scenarios.size(); ++i) {
    const auto& x = a.scenarios[i];
    const auto& y = b.scenarios[i];
    if (x.name != y.name || x.params.size() != y.params.size() ||
        x.specs.size() != y.specs.size() || x.cndacts.size() != y.cndacts.size() ||
        x.cycle_bound != y.cycle_bound)
      return false;
    for (std::size_t j = 0; j < x.params.size(); ++j)
      if (x.params[j].name != y.params[j].name || x.params[j].is_const != y.params[j].is_const ||
          !type_equal(x.params[j].type, y.params[j].type))
        return false;
    if (!expr_equal(x.precondition, y.precondition)) return false;
    for (std::size_t j = 0; j < x.specs.size(); ++j)
      if (!ltl_equal(x.specs[j], y.specs[j])) return false;
    if (!block_equal(x.initact, y.initact)) return false;
    for (std::size_t j = 0; j < x.cndacts.size(); ++j) {
      if (x.cndacts[j].kind != y.cndacts[j].kind ||
          !expr_equal(x.cndacts[j].condition, y.cndacts[j].condition) ||
          !block_equal(x.cndacts[j].actions, y.cndacts[j].actions))
        return false;
    }
  }

  if (a.systest.has_value() != b.systest.has_value()) return false;
  if (a.systest) {
    const auto& x = *a.systest;
    const auto& y = *b.systest;
    if (x.collaboration.objects.size() != y.collaboration.objects.size()) return false;
    for (std::size_t i = 0; i < x.collaboration.objects.size(); ++i)
      if (x.collaboration.objects[i].name != y.collaboration.objects[i].name ||
          !type_equal(x.collaboration.objects[i].type, y.collaboration.objects[i].type))
        return false;
    if (x.collaboration.interfaces.size() != y.collaboration.interfaces.size()) return false;
    for (std::size_t i = 0; i < x.collaboration.interfaces.size(); ++i) {
      const auto& p = x.collaboration.interfaces[i];
      const auto& q = y.collaboration.interfaces[i];
      if (p.name != q.name || !expr_equal(p.index, q.index) || !expr_equal(p.from, q.from) ||
          !expr_equal(p.to, q.to) || p.repl_var != q.repl_var ||
          !expr_equal(p.repl_lo, q.repl_lo) || !expr_equal(p.repl_hi, q.repl_hi))
        return false;
    }
    if (!schedule_equal(x.schedule, y.schedule)) return false;
  }

  if (a.instances.size() != b.instances.size()) return false;
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    const auto& x = a.instances[i];
    const auto& y = b.instances[i];
    if (x.name != y.name || x.scenario != y.scenario || x.bindings.size() != y.bindings.size())
      return false;
    for (std::size_t j = 0; j < x.bindings.size(); ++j)
      if (x.bindings[j].first != y.bindings[j].first ||
          !expr_equal(x.bindings[j].second, y.bindings[j].second))
        return false;
  }
  return true;
}

} // namespace scsl
