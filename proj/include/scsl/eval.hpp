#pragma once

// Quantifier-free expression evaluation over valuations, plus the action
// interpreter (while-language with terminating loops) used by initact and
// condition-action execution.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "scsl/ast.hpp"
#include "scsl/valuation.hpp"

namespace scsl {

struct EvalContext {
  const Valuation* sigma = nullptr;
  const std::map<std::string, Value>* consts = nullptr;
  // auxiliary variables, scalar parameters, bound comprehension variables;
  // mutable for popfront and action execution
  std::map<std::string, Value>* locals = nullptr;
  // formal object-parameter name -> symbol path ("r" -> "r", "r" -> "r[2]")
  const std::map<std::string, std::string>* symbol_bindings = nullptr;
  const Specification* spec = nullptr;

  const Value* lookup_symbol(const std::string& path) const {
    return sigma ? sigma->find(path) : nullptr;
  }
};

Value eval_expr(const ExprPtr& e, EvalContext& ctx);

// Evaluates e and requires a bool.
bool eval_bool(const ExprPtr& e, EvalContext& ctx);

// Evaluates a frame-style expression to a set of symbol paths.
std::set<std::string> eval_symbol_set(const ExprPtr& e, EvalContext& ctx);

// Resolves an lvalue/object path expression to its flat symbol name,
// e.g. cc.cmd[i] with i=1 -> "cc.cmd[1]".
std::string eval_symbol_path(const ExprPtr& e, EvalContext& ctx);

// Binds all global constants by evaluating initializers in declaration order.
// `overrides` replaces initializer expressions by fixed values before
// evaluation (CLI --set). Returns diagnostics for unbound/failed entries.
Diagnostics bind_constants(const Specification& spec,
                           const std::map<std::string, Value>& overrides,
                           std::map<std::string, Value>& out);

// Default value for a type: false, 0, 0.0, first enum literal, empty
// collections, null object references, zero-filled records.
Value default_value(const TypePtr& t, const Specification& spec,
                    const std::map<std::string, Value>& consts);

// ---------------------------------------------------------------------------
// Action execution

struct ActionEffects {
  // writes to object parameters (framed), path -> value
  std::map<std::string, Value> symbol_writes;
  // collaboration mutations in program order
  struct Mutation {
    enum class Kind { Delete, CreateObject, CreateInterface } kind;
    std::string target;       // object handle for Delete/CreateObject
    std::string type_name;    // CreateObject
    std::string iface_name;   // CreateInterface
    std::string iface_from;
    std::string iface_to;
  };
  std::vector<Mutation> mutations;
  bool eot_requested = false;
};

// Executes an action block: auxiliary updates land in ctx.locals immediately
// (sequential while-language semantics), object-parameter writes and
// collaboration mutations are collected into `effects` for the engine to
// apply next tick. `frame` is consulted for every object-parameter write;
// a write outside the frame raises RuntimeError(FrameViolation).
void exec_actions(const ActionBlock& block, EvalContext& ctx,
                  const std::set<std::string>& object_param_roots,
                  ActionEffects& effects);

// Built-in global function dispatch (inExclusionZone, isCloseTo).
bool is_builtin_function(const std::string& name);

} // namespace scsl
