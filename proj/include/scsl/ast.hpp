#pragma once

// Abstract syntax of SCSL specifications: types, expressions, LTL formulae,
// declarations, and the system test configuration. All nodes are immutable
// after parsing; the tree is shared freely via shared_ptr.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scsl/source.hpp"

namespace scsl {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// ---------------------------------------------------------------------------
// Types

enum class TypeKind {
  Bool,
  Int,
  Nat,
  Real,
  Token,        // opaque string tokens (ItemId)
  EnumRef,
  CompositeRef,
  Array,
  List,
  Set,
  ObjectRef,
  Collaboration,
};

struct TypeExpr;
using TypePtr = std::shared_ptr<const TypeExpr>;

struct TypeExpr {
  TypeKind kind;
  std::string name;  // EnumRef / CompositeRef / ObjectRef
  TypePtr elem;      // Array / List / Set
  ExprPtr size;      // Array extent; references constants and literals only

  static TypePtr make(TypeKind k);
  static TypePtr named(TypeKind k, std::string name);
  static TypePtr array_of(TypePtr elem, ExprPtr size);
  static TypePtr list_of(TypePtr elem);
  static TypePtr set_of(TypePtr elem);

  bool is_numeric() const { return kind == TypeKind::Int || kind == TypeKind::Nat || kind == TypeKind::Real; }
  bool is_integer() const { return kind == TypeKind::Int || kind == TypeKind::Nat; }
};

bool type_equal(const TypePtr& a, const TypePtr& b);
std::string type_str(const TypePtr& t);

// ---------------------------------------------------------------------------
// Expressions

enum class ExprKind {
  BoolLit,
  IntLit,
  RealLit,
  StringLit,   // token literal
  NullLit,
  Ident,       // unresolved name: symbol, constant, enum literal, or parameter
  Field,       // base.name
  Index,       // base[index]
  Call,        // fn(args) — global function, builtin, or composite constructor
  Unary,       // ! -
  Binary,
  SetLit,      // { e1, ..., en }
  ListLit,     // [ e1, ..., en ]
  TupleLit,    // ( e1, e2 ) — composite construction, typed from context
  SetComp,     // { var : lo..hi | pred }
  SetMap,      // { e1, ..., em | var in source } or { e1, ..., em | var : lo..hi }
  Forall,      // forall var : lo..hi . body — finite conjunction
};

enum class BinOp {
  And, Or, Implies, Iff,
  Eq, Ne, Lt, Le, Gt, Ge,
  Add, Sub, Mul, Div, Mod,
  In,        // membership
  Union,     // set union
  SetMinus,  // set difference
};

enum class UnOp { Not, Neg, Card /* #e */ };

struct Expr {
  ExprKind kind;
  SourceSpan span;

  // literals
  bool bool_val = false;
  std::int64_t int_val = 0;
  double real_val = 0.0;
  std::string str_val;  // Ident name, StringLit, Field name, Call callee

  ExprPtr base;  // Field / Index base
  std::vector<ExprPtr> args;  // Call args, Index[args[0]], Unary/Binary operands,
                              // collection elements, SetMap element exprs
  BinOp bin_op = BinOp::And;
  UnOp un_op = UnOp::Not;

  // SetComp / SetMap / Forall
  std::string bound_var;
  ExprPtr range_lo;
  ExprPtr range_hi;
  ExprPtr source;  // SetMap over a set value
  ExprPtr body;    // predicate / forall body

  static ExprPtr make_bool(bool v, SourceSpan sp = {});
  static ExprPtr make_int(std::int64_t v, SourceSpan sp = {});
  static ExprPtr make_real(double v, SourceSpan sp = {});
  static ExprPtr make_string(std::string v, SourceSpan sp = {});
  static ExprPtr make_null(SourceSpan sp = {});
  static ExprPtr ident(std::string name, SourceSpan sp = {});
  static ExprPtr field(ExprPtr base, std::string name, SourceSpan sp = {});
  static ExprPtr index(ExprPtr base, ExprPtr idx, SourceSpan sp = {});
  static ExprPtr call(std::string callee, std::vector<ExprPtr> args, SourceSpan sp = {});
  static ExprPtr unary(UnOp op, ExprPtr e, SourceSpan sp = {});
  static ExprPtr binary(BinOp op, ExprPtr l, ExprPtr r, SourceSpan sp = {});
  static ExprPtr set_lit(std::vector<ExprPtr> elems, SourceSpan sp = {});
  static ExprPtr list_lit(std::vector<ExprPtr> elems, SourceSpan sp = {});
  static ExprPtr tuple_lit(std::vector<ExprPtr> elems, SourceSpan sp = {});
  static ExprPtr set_comp(std::string var, ExprPtr lo, ExprPtr hi, ExprPtr pred, SourceSpan sp = {});
  static ExprPtr set_map(std::vector<ExprPtr> elems, std::string var, ExprPtr source,
                         ExprPtr lo, ExprPtr hi, SourceSpan sp = {});
  static ExprPtr forall(std::string var, ExprPtr lo, ExprPtr hi, ExprPtr body, SourceSpan sp = {});
};

bool expr_equal(const ExprPtr& a, const ExprPtr& b);
std::size_t expr_hash(const ExprPtr& e);
std::string expr_str(const ExprPtr& e);

// Substitute identifiers by replacement expressions (capture-avoiding over
// bound comprehension variables). Used for schedule replication indices and
// actual-parameter substitution.
ExprPtr expr_subst(const ExprPtr& e, const std::map<std::string, ExprPtr>& subst);

// ---------------------------------------------------------------------------
// LTL formulae (finite-trace). Derived operators are stored explicitly.

enum class LtlKind {
  Atom,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Next,
  Until,
  Finally,
  Globally,
};

struct LtlFormula;
using LtlPtr = std::shared_ptr<const LtlFormula>;

struct LtlFormula {
  LtlKind kind;
  ExprPtr atom;  // Atom
  LtlPtr lhs;
  LtlPtr rhs;
  SourceSpan span;

  static LtlPtr make_atom(ExprPtr e, SourceSpan sp = {});
  static LtlPtr make_not(LtlPtr f);
  static LtlPtr make_and(LtlPtr l, LtlPtr r);
  static LtlPtr make_or(LtlPtr l, LtlPtr r);
  static LtlPtr implies(LtlPtr l, LtlPtr r);
  static LtlPtr iff(LtlPtr l, LtlPtr r);
  static LtlPtr next(LtlPtr f);
  static LtlPtr until(LtlPtr l, LtlPtr r);
  static LtlPtr finally_(LtlPtr f);
  static LtlPtr globally(LtlPtr f);
};

bool ltl_equal(const LtlPtr& a, const LtlPtr& b);
std::string ltl_str(const LtlPtr& f);
LtlPtr ltl_subst(const LtlPtr& f, const std::map<std::string, ExprPtr>& subst);
void ltl_atoms(const LtlPtr& f, std::vector<ExprPtr>& out);  // distinct atoms, first-seen order

// ---------------------------------------------------------------------------
// Actions (conventional while-language with terminating loops)

enum class StmtKind { Assign, If, Foreach, CollDelete, CollCreateObject, CollCreateInterface };

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Stmt {
  StmtKind kind;
  SourceSpan span;

  ExprPtr lhs;  // Assign target (Ident / Field / Index path), CollDelete argument
  ExprPtr rhs;  // Assign value
  ExprPtr cond;
  std::vector<StmtPtr> then_body;
  std::vector<StmtPtr> else_body;
  std::string loop_var;
  ExprPtr loop_source;
  std::vector<StmtPtr> loop_body;

  // CollCreateObject: name/index/type; CollCreateInterface: interface spec
  std::string create_name;
  ExprPtr create_index;
  TypePtr create_type;
  ExprPtr iface_from;
  ExprPtr iface_to;
};

using ActionBlock = std::vector<StmtPtr>;

enum class CondKind { Guard, Change };

struct CondAction {
  CondKind kind = CondKind::Guard;
  ExprPtr condition;
  ActionBlock actions;
  SourceSpan span;
};

// ---------------------------------------------------------------------------
// Declarations

struct EnumDecl {
  std::string name;
  std::vector<std::string> literals;
  SourceSpan span;
};

struct CompositeDecl {
  std::string name;
  std::vector<std::pair<std::string, TypePtr>> fields;
  SourceSpan span;
};

struct ConstDecl {
  std::string name;
  TypePtr type;
  ExprPtr init;  // optional literal/constant expression
  SourceSpan span;
};

struct GlobalConstants {
  std::vector<ConstDecl> entries;
  std::vector<ExprPtr> constraints;
};

struct FunctionDecl {
  std::string name;
  std::vector<std::pair<std::string, TypePtr>> params;
  TypePtr result;
  ExprPtr body;  // null for builtin bodies (inExclusionZone, isCloseTo)
  bool builtin = false;
  SourceSpan span;
};

enum class ParamDir { In, Out };

struct ObjectParam {
  ParamDir dir = ParamDir::In;
  std::string name;
  TypePtr type;
};

struct ObjectTypeDecl {
  std::string name;
  std::vector<ObjectParam> params;
  int cycletime = 1;
  bool auxiliary = false;  // auxiliary object types (test metadata containers)
  SourceSpan span;
};

struct ScenarioParam {
  std::string name;
  TypePtr type;
  bool is_const = false;
};

struct ScenarioTypeDecl {
  std::string name;
  std::vector<ScenarioParam> params;
  ExprPtr precondition;  // optional
  std::vector<LtlPtr> specs;
  ActionBlock initact;
  std::vector<CondAction> cndacts;
  std::optional<int> cycle_bound;  // per-scenario override of the Next window bound
  SourceSpan span;
};

// ---------------------------------------------------------------------------
// System test configuration

struct ObjectInstanceDecl {
  std::string name;
  TypePtr type;      // ObjectRef, possibly Array of ObjectRef
  SourceSpan span;
};

struct InterfaceDecl {
  std::string name;        // e.g. Is
  ExprPtr index;           // optional [i]
  ExprPtr from;            // out endpoint (path expression)
  ExprPtr to;              // in endpoint
  std::string repl_var;    // "for i : lo..hi" replication, empty if none
  ExprPtr repl_lo;
  ExprPtr repl_hi;
  SourceSpan span;
};

struct ScheduleNode;
using SchedulePtr = std::shared_ptr<const ScheduleNode>;

enum class ScheduleKind { Leaf, Seq, Par, Replicate };

struct ScheduleNode {
  ScheduleKind kind;
  SourceSpan span;

  // Leaf
  std::string scenario;
  std::vector<ExprPtr> args;

  // Seq / Par
  std::vector<SchedulePtr> children;

  // Replicate (parallel over an index range)
  std::string var;
  ExprPtr lo;
  ExprPtr hi;
  SchedulePtr body;
};

struct CollaborationDecl {
  std::vector<ObjectInstanceDecl> objects;
  std::vector<InterfaceDecl> interfaces;
};

struct SystemTestConfig {
  CollaborationDecl collaboration;
  SchedulePtr schedule;
  SourceSpan span;
};

// Standalone `instance <name> of scenario T(p := v, ...);` declaration.
struct InstanceDecl {
  std::string name;
  std::string scenario;
  std::vector<std::pair<std::string, ExprPtr>> bindings;
  SourceSpan span;
};

// ---------------------------------------------------------------------------
// Whole specification

struct Specification {
  std::vector<EnumDecl> enums;
  std::vector<CompositeDecl> composites;
  GlobalConstants constants;
  std::vector<FunctionDecl> functions;
  std::vector<ObjectTypeDecl> object_types;
  std::vector<ScenarioTypeDecl> scenarios;
  std::optional<SystemTestConfig> systest;
  std::vector<InstanceDecl> instances;

  const EnumDecl* find_enum(const std::string& name) const;
  const CompositeDecl* find_composite(const std::string& name) const;
  const ConstDecl* find_const(const std::string& name) const;
  const FunctionDecl* find_function(const std::string& name) const;
  const ObjectTypeDecl* find_object_type(const std::string& name) const;
  const ScenarioTypeDecl* find_scenario(const std::string& name) const;
  // Enum literal lookup: returns (enum name, literal index) or nullopt.
  std::optional<std::pair<std::string, int>> find_enum_literal(const std::string& lit) const;
};

bool spec_equal(const Specification& a, const Specification& b);

} // namespace scsl
