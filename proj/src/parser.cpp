#include "scsl/parser.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "scsl/lexer.hpp"

namespace scsl {

namespace {

// Keywords that terminate statement lists inside scenario bodies.
const std::set<std::string> kStmtEnders = {
    "end", "endif", "else", "done", "spec", "precondition", "initact",
    "cndact", "cyclebound",
};

class Parser {
 public:
  Parser(std::vector<Token> toks, Diagnostics& diags)
      : toks_(std::move(toks)), diags_(diags) {}

  Specification parse_file() {
    Specification spec;
    while (!at_end()) {
      std::size_t before = pos_;
      if (peek_ident("enum")) {
        parse_enum_block(spec);
      } else if (peek_ident("composite")) {
        parse_composite_block(spec);
      } else if (peek_ident("global") && peek_ident("const", 1)) {
        parse_const_block(spec);
      } else if (peek_ident("global") && peek_ident("function", 1)) {
        parse_function_block(spec);
      } else if (peek_ident("object") || (peek_ident("auxiliary") && peek_ident("object", 1))) {
        parse_object_type(spec);
      } else if (peek_ident("elementary")) {
        parse_scenario(spec);
      } else if (peek_ident("systemtest")) {
        parse_systemtest(spec);
      } else if (peek_ident("instance")) {
        parse_instance(spec);
      } else {
        error("expected a top-level declaration");
        synchronize_top();
      }
      if (pos_ == before) advance();  // guarantee progress
    }
    expand_quantified_specs(spec);
    resolve_named_types(spec);
    check_duplicates(spec);
    return spec;
  }

 private:
  std::vector<Token> toks_;
  Diagnostics& diags_;
  std::size_t pos_ = 0;

  const Token& cur(std::size_t off = 0) const {
    std::size_t i = pos_ + off;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at_end() const { return cur().kind == TokKind::End; }
  void advance() {
    if (pos_ + 1 < toks_.size()) ++pos_;
  }
  bool peek_punct(const std::string& p, std::size_t off = 0) const {
    return cur(off).kind == TokKind::Punct && cur(off).text == p;
  }
  bool peek_ident(const std::string& id, std::size_t off = 0) const {
    return cur(off).kind == TokKind::Ident && cur(off).text == id;
  }
  bool eat_punct(const std::string& p) {
    if (peek_punct(p)) {
      advance();
      return true;
    }
    return false;
  }
  bool eat_ident(const std::string& id) {
    if (peek_ident(id)) {
      advance();
      return true;
    }
    return false;
  }
  void expect_punct(const std::string& p) {
    if (!eat_punct(p)) error("expected '" + p + "'");
  }
  void expect_ident(const std::string& id) {
    if (!eat_ident(id)) error("expected keyword '" + id + "'");
  }
  std::string expect_name(const char* what) {
    if (cur().kind == TokKind::Ident) {
      std::string s = cur().text;
      advance();
      return s;
    }
    error(std::string("expected ") + what);
    return "_error_";
  }
  void error(const std::string& msg) { diags_.push_back(Diagnostic::error(msg, cur().span)); }

  void synchronize_top() {
    // statement-level resynchronization: skip to the next plausible top-level keyword
    while (!at_end() && !peek_ident("enum") && !peek_ident("composite") &&
           !peek_ident("global") && !peek_ident("object") && !peek_ident("auxiliary") &&
           !peek_ident("elementary") && !peek_ident("systemtest") && !peek_ident("instance"))
      advance();
  }

  // -------------------------------------------------------------------------
  // Types

  TypePtr parse_type() {
    TypePtr base;
    SourceSpan sp = cur().span;
    if (eat_ident("bool")) {
      base = TypeExpr::make(TypeKind::Bool);
    } else if (eat_ident("int")) {
      base = TypeExpr::make(TypeKind::Int);
    } else if (eat_ident("nat")) {
      base = TypeExpr::make(TypeKind::Nat);
    } else if (eat_ident("real")) {
      base = TypeExpr::make(TypeKind::Real);
    } else if (eat_ident("ItemId")) {
      base = TypeExpr::make(TypeKind::Token);
    } else if (eat_ident("collaboration")) {
      base = TypeExpr::make(TypeKind::Collaboration);
    } else if (eat_ident("list")) {
      expect_ident("of");
      base = TypeExpr::list_of(parse_type());
    } else if (eat_ident("set")) {
      expect_ident("of");
      base = TypeExpr::set_of(parse_type());
    } else if (cur().kind == TokKind::Ident) {
      // enum / composite / object reference; resolved after the whole file is read
      base = TypeExpr::named(TypeKind::CompositeRef, expect_name("type name"));
    } else {
      error("expected a type");
      base = TypeExpr::make(TypeKind::Bool);
    }
    (void)sp;
    while (peek_punct("[")) {
      advance();
      ExprPtr size = parse_expr();
      expect_punct("]");
      base = TypeExpr::array_of(base, size);
    }
    return base;
  }

  // -------------------------------------------------------------------------
  // Expressions

  ExprPtr parse_expr() { return parse_iff(); }

  ExprPtr parse_iff() {
    ExprPtr e = parse_implies();
    while (peek_punct("<=>")) {
      SourceSpan sp = cur().span;
      advance();
      e = Expr::binary(BinOp::Iff, e, parse_implies(), sp);
    }
    return e;
  }
  ExprPtr parse_implies() {
    ExprPtr e = parse_or();
    if (peek_punct("=>")) {
      SourceSpan sp = cur().span;
      advance();
      return Expr::binary(BinOp::Implies, e, parse_implies(), sp);
    }
    return e;
  }
  ExprPtr parse_or() {
    ExprPtr e = parse_and();
    while (peek_punct("||")) {
      SourceSpan sp = cur().span;
      advance();
      e = Expr::binary(BinOp::Or, e, parse_and(), sp);
    }
    return e;
  }
  ExprPtr parse_and() {
    ExprPtr e = parse_cmp();
    while (peek_punct("&&")) {
      SourceSpan sp = cur().span;
      advance();
      e = Expr::binary(BinOp::And, e, parse_cmp(), sp);
    }
    return e;
  }
  std::optional<BinOp> match_cmp_op() {
    static const std::pair<const char*, BinOp> cmps[] = {
        {"=", BinOp::Eq},  {"!=", BinOp::Ne}, {"<=", BinOp::Le},
        {">=", BinOp::Ge}, {"<", BinOp::Lt},  {">", BinOp::Gt},
    };
    for (const auto& [sym, op] : cmps) {
      if (peek_punct(sym)) {
        advance();
        return op;
      }
    }
    if (peek_ident("in")) {
      advance();
      return BinOp::In;
    }
    return std::nullopt;
  }

  ExprPtr parse_cmp() {
    ExprPtr first = parse_additive();
    SourceSpan sp = cur().span;
    std::vector<std::pair<BinOp, ExprPtr>> chain;
    while (auto op = match_cmp_op()) chain.emplace_back(*op, parse_additive());
    if (chain.empty()) return first;
    if (chain.size() == 1) return Expr::binary(chain[0].first, first, chain[0].second, sp);
    // chained comparison k <= m <= n reads as (k <= m) && (m <= n)
    ExprPtr acc;
    ExprPtr prev = first;
    for (auto& [op, rhs] : chain) {
      ExprPtr cmp = Expr::binary(op, prev, rhs, sp);
      acc = acc ? Expr::binary(BinOp::And, acc, cmp, sp) : cmp;
      prev = rhs;
    }
    return acc;
  }
  ExprPtr parse_additive() {
    ExprPtr e = parse_multiplicative();
    for (;;) {
      SourceSpan sp = cur().span;
      if (peek_punct("+")) {
        advance();
        e = Expr::binary(BinOp::Add, e, parse_multiplicative(), sp);
      } else if (peek_punct("-")) {
        advance();
        e = Expr::binary(BinOp::Sub, e, parse_multiplicative(), sp);
      } else if (peek_punct("\\")) {
        advance();
        e = Expr::binary(BinOp::SetMinus, e, parse_multiplicative(), sp);
      } else if (peek_ident("union")) {
        advance();
        e = Expr::binary(BinOp::Union, e, parse_multiplicative(), sp);
      } else {
        return e;
      }
    }
  }
  ExprPtr parse_multiplicative() {
    ExprPtr e = parse_unary();
    for (;;) {
      SourceSpan sp = cur().span;
      if (peek_punct("*")) {
        advance();
        e = Expr::binary(BinOp::Mul, e, parse_unary(), sp);
      } else if (peek_punct("/")) {
        advance();
        e = Expr::binary(BinOp::Div, e, parse_unary(), sp);
      } else if (peek_punct("%")) {
        advance();
        e = Expr::binary(BinOp::Mod, e, parse_unary(), sp);
      } else {
        return e;
      }
    }
  }
  ExprPtr parse_unary() {
    SourceSpan sp = cur().span;
    if (eat_punct("!")) return Expr::unary(UnOp::Not, parse_unary(), sp);
    if (eat_punct("-")) return Expr::unary(UnOp::Neg, parse_unary(), sp);
    if (eat_punct("#")) return Expr::unary(UnOp::Card, parse_unary(), sp);
    return parse_postfix();
  }
  // Range bounds: a parenthesized bound swallows no postfix so that the
  // separator in `forall i : 0..(n-1) . phi` stays with the quantifier.
  ExprPtr parse_range_bound() {
    if (peek_punct("(")) {
      advance();
      ExprPtr e = parse_expr();
      expect_punct(")");
      return e;
    }
    return parse_additive();
  }

  ExprPtr parse_postfix() {
    ExprPtr e = parse_primary();
    for (;;) {
      SourceSpan sp = cur().span;
      if (peek_punct(".") && cur(1).kind == TokKind::Ident && !peek_punct(".", 1)) {
        advance();
        std::string name = expect_name("field name");
        e = Expr::field(e, name, sp);
      } else if (peek_punct("[")) {
        advance();
        ExprPtr idx = parse_expr();
        expect_punct("]");
        e = Expr::index(e, idx, sp);
      } else {
        return e;
      }
    }
  }
  ExprPtr parse_primary() {
    SourceSpan sp = cur().span;
    if (cur().kind == TokKind::Int) {
      auto e = Expr::make_int(cur().int_val, sp);
      advance();
      return e;
    }
    if (cur().kind == TokKind::Real) {
      auto e = Expr::make_real(cur().real_val, sp);
      advance();
      return e;
    }
    if (cur().kind == TokKind::String) {
      auto e = Expr::make_string(cur().text, sp);
      advance();
      return e;
    }
    if (eat_ident("true")) return Expr::make_bool(true, sp);
    if (eat_ident("false")) return Expr::make_bool(false, sp);
    if (eat_ident("null")) return Expr::make_null(sp);
    if (eat_ident("forall")) {
      std::string var = expect_name("bound variable");
      expect_punct(":");
      ExprPtr lo = parse_range_bound();
      expect_punct("..");
      ExprPtr hi = parse_range_bound();
      expect_punct(".");
      ExprPtr body = parse_expr();
      return Expr::forall(var, lo, hi, body, sp);
    }
    if (cur().kind == TokKind::Ident) {
      std::string name = cur().text;
      if (peek_punct("(", 1)) {
        advance();
        advance();
        std::vector<ExprPtr> args;
        if (!peek_punct(")")) {
          args.push_back(parse_expr());
          while (eat_punct(",")) args.push_back(parse_expr());
        }
        expect_punct(")");
        return Expr::call(name, std::move(args), sp);
      }
      advance();
      return Expr::ident(name, sp);
    }
    if (eat_punct("(")) {
      ExprPtr first = parse_expr();
      if (peek_punct(",")) {
        std::vector<ExprPtr> elems{first};
        while (eat_punct(",")) elems.push_back(parse_expr());
        expect_punct(")");
        return Expr::tuple_lit(std::move(elems), sp);
      }
      expect_punct(")");
      return first;
    }
    if (eat_punct("[")) {
      std::vector<ExprPtr> elems;
      if (!peek_punct("]")) {
        elems.push_back(parse_expr());
        while (eat_punct(",")) elems.push_back(parse_expr());
      }
      expect_punct("]");
      return Expr::list_lit(std::move(elems), sp);
    }
    if (eat_punct("{")) {
      if (eat_punct("}")) return Expr::set_lit({}, sp);
      // comprehension: { i : lo..hi | pred }
      if (cur().kind == TokKind::Ident && peek_punct(":", 1)) {
        std::string var = cur().text;
        advance();
        advance();
        ExprPtr lo = parse_range_bound();
        expect_punct("..");
        ExprPtr hi = parse_range_bound();
        expect_punct("|");
        ExprPtr pred = parse_expr();
        expect_punct("}");
        return Expr::set_comp(var, lo, hi, pred, sp);
      }
      std::vector<ExprPtr> elems;
      elems.push_back(parse_expr());
      while (eat_punct(",")) elems.push_back(parse_expr());
      if (eat_punct("|")) {
        // mapped comprehension: { e1, ..., em | j in src } or { ... | j : lo..hi }
        std::string var = expect_name("bound variable");
        if (eat_ident("in")) {
          ExprPtr src = parse_expr();
          expect_punct("}");
          return Expr::set_map(std::move(elems), var, src, nullptr, nullptr, sp);
        }
        expect_punct(":");
        ExprPtr lo = parse_range_bound();
        expect_punct("..");
        ExprPtr hi = parse_range_bound();
        expect_punct("}");
        return Expr::set_map(std::move(elems), var, nullptr, lo, hi, sp);
      }
      expect_punct("}");
      return Expr::set_lit(std::move(elems), sp);
    }
    error("expected an expression");
    advance();
    return Expr::make_bool(false, sp);
  }

  // -------------------------------------------------------------------------
  // LTL formulae: temporal and boolean structure at the formula level,
  // comparisons and below are atoms.

  LtlPtr parse_ltl() { return parse_ltl_iff(); }

  LtlPtr parse_ltl_iff() {
    LtlPtr f = parse_ltl_implies();
    while (peek_punct("<=>")) {
      advance();
      f = LtlFormula::iff(f, parse_ltl_implies());
    }
    return f;
  }
  LtlPtr parse_ltl_implies() {
    LtlPtr f = parse_ltl_or();
    if (peek_punct("=>")) {
      advance();
      return LtlFormula::implies(f, parse_ltl_implies());
    }
    return f;
  }
  LtlPtr parse_ltl_or() {
    LtlPtr f = parse_ltl_and();
    while (peek_punct("||")) {
      advance();
      f = LtlFormula::make_or(f, parse_ltl_and());
    }
    return f;
  }
  LtlPtr parse_ltl_and() {
    LtlPtr f = parse_ltl_until();
    while (peek_punct("&&")) {
      advance();
      f = LtlFormula::make_and(f, parse_ltl_until());
    }
    return f;
  }
  LtlPtr parse_ltl_until() {
    LtlPtr f = parse_ltl_unary();
    if (peek_ident("U")) {
      advance();
      return LtlFormula::until(f, parse_ltl_until());
    }
    return f;
  }
  LtlPtr parse_ltl_unary() {
    SourceSpan sp = cur().span;
    if (peek_ident("G")) {
      advance();
      return LtlFormula::globally(parse_ltl_unary());
    }
    if (peek_ident("F")) {
      advance();
      return LtlFormula::finally_(parse_ltl_unary());
    }
    if (peek_ident("X")) {
      advance();
      return LtlFormula::next(parse_ltl_unary());
    }
    if (peek_punct("!")) {
      advance();
      return LtlFormula::make_not(parse_ltl_unary());
    }
    if (peek_punct("(")) {
      advance();
      LtlPtr f = parse_ltl();
      // a parenthesized formula may continue as an expression atom, e.g. (a + b) < c;
      // temporal subformulas cannot, so only pure atoms are rewrapped
      if (f->kind == LtlKind::Atom &&
          (peek_punct("=") || peek_punct("!=") || peek_punct("<") || peek_punct("<=") ||
           peek_punct(">") || peek_punct(">=") || peek_ident("in") || peek_punct("+") ||
           peek_punct("-") || peek_punct("*") || peek_punct("/") || peek_punct(",") ||
           peek_punct("."))) {
        ExprPtr e = continue_expr_from(f->atom, sp);
        return LtlFormula::make_atom(e, sp);
      }
      expect_punct(")");
      return f;
    }
    if (eat_ident("forall")) {
      // quantified conjunction over an index range; expanded after parsing
      std::string var = expect_name("bound variable");
      expect_punct(":");
      ExprPtr lo = parse_range_bound();
      expect_punct("..");
      ExprPtr hi = parse_range_bound();
      expect_punct(".");
      LtlPtr body = parse_ltl_unary();
      // forall over a temporal body rides on an Expr::Forall whose body slot
      // is unused; the LTL body is carried in lhs until the expansion pass
      auto holder = std::const_pointer_cast<LtlFormula>(
          LtlFormula::make_atom(Expr::forall(var, lo, hi, nullptr, sp), sp));
      holder->lhs = body;
      return holder;
    }
    // plain atom
    ExprPtr e = parse_cmp();
    return LtlFormula::make_atom(e, sp);
  }

  // After '(' expr has been parsed as an LTL atom but the next token shows it
  // was really a parenthesized sub-expression (tuple element, comparison LHS),
  // resume expression parsing around it.
  ExprPtr continue_expr_from(ExprPtr inner, SourceSpan sp) {
    if (peek_punct(",")) {
      std::vector<ExprPtr> elems{inner};
      while (eat_punct(",")) elems.push_back(parse_expr());
      expect_punct(")");
      ExprPtr tup = Expr::tuple_lit(std::move(elems), sp);
      return finish_expr_chain(tup);
    }
    expect_punct(")");
    return finish_expr_chain(inner);
  }

  ExprPtr finish_expr_chain(ExprPtr e) {
    // postfix
    for (;;) {
      SourceSpan sp = cur().span;
      if (peek_punct(".") && cur(1).kind == TokKind::Ident) {
        advance();
        e = Expr::field(e, expect_name("field name"), sp);
      } else if (peek_punct("[")) {
        advance();
        ExprPtr idx = parse_expr();
        expect_punct("]");
        e = Expr::index(e, idx, sp);
      } else {
        break;
      }
    }
    // multiplicative / additive / comparison continuation
    for (;;) {
      SourceSpan sp = cur().span;
      if (peek_punct("*")) { advance(); e = Expr::binary(BinOp::Mul, e, parse_unary(), sp); }
      else if (peek_punct("/")) { advance(); e = Expr::binary(BinOp::Div, e, parse_unary(), sp); }
      else if (peek_punct("%")) { advance(); e = Expr::binary(BinOp::Mod, e, parse_unary(), sp); }
      else break;
    }
    for (;;) {
      SourceSpan sp = cur().span;
      if (peek_punct("+")) { advance(); e = Expr::binary(BinOp::Add, e, parse_multiplicative(), sp); }
      else if (peek_punct("-")) { advance(); e = Expr::binary(BinOp::Sub, e, parse_multiplicative(), sp); }
      else if (peek_punct("\\")) { advance(); e = Expr::binary(BinOp::SetMinus, e, parse_multiplicative(), sp); }
      else if (peek_ident("union")) { advance(); e = Expr::binary(BinOp::Union, e, parse_multiplicative(), sp); }
      else break;
    }
    static const std::pair<const char*, BinOp> cmps[] = {
        {"=", BinOp::Eq},  {"!=", BinOp::Ne}, {"<=", BinOp::Le},
        {">=", BinOp::Ge}, {"<", BinOp::Lt},  {">", BinOp::Gt},
    };
    for (const auto& [sym, op] : cmps) {
      if (peek_punct(sym)) {
        SourceSpan sp = cur().span;
        advance();
        return Expr::binary(op, e, parse_additive(), sp);
      }
    }
    if (peek_ident("in")) {
      SourceSpan sp = cur().span;
      advance();
      return Expr::binary(BinOp::In, e, parse_additive(), sp);
    }
    return e;
  }

  // -------------------------------------------------------------------------
  // Statements

  ActionBlock parse_stmts() {
    ActionBlock block;
    while (!at_end()) {
      if (cur().kind == TokKind::Ident && kStmtEnders.count(cur().text)) break;
      StmtPtr s = parse_stmt();
      if (s) block.push_back(s);
    }
    return block;
  }

  StmtPtr parse_stmt() {
    SourceSpan sp = cur().span;
    if (eat_ident("if")) {
      auto s = std::make_shared<Stmt>();
      s->kind = StmtKind::If;
      s->span = sp;
      s->cond = parse_expr();
      expect_ident("then");
      s->then_body = parse_stmts();
      if (eat_ident("else")) s->else_body = parse_stmts();
      expect_ident("endif");
      return s;
    }
    if (eat_ident("foreach")) {
      auto s = std::make_shared<Stmt>();
      s->kind = StmtKind::Foreach;
      s->span = sp;
      s->loop_var = expect_name("loop variable");
      expect_ident("in");
      s->loop_source = parse_expr();
      expect_ident("do");
      s->loop_body = parse_stmts();
      expect_ident("done");
      return s;
    }
    // assignment or collaboration operation
    ExprPtr lhs = parse_postfix();
    if (lhs->kind == ExprKind::Field &&
        (lhs->str_val == "delete" || lhs->str_val == "create") && peek_punct("(")) {
      std::string op = lhs->str_val;
      ExprPtr collab = lhs->base;
      advance();  // '('
      auto s = std::make_shared<Stmt>();
      s->span = sp;
      s->loop_source = collab;  // collaboration expression
      if (op == "delete") {
        s->kind = StmtKind::CollDelete;
        s->lhs = parse_expr();
        expect_punct(")");
      } else if (eat_ident("interface")) {
        s->kind = StmtKind::CollCreateInterface;
        s->create_name = expect_name("interface name");
        if (eat_punct("[")) {
          s->create_index = parse_expr();
          expect_punct("]");
        }
        expect_ident("from");
        s->iface_from = parse_expr();
        expect_ident("to");
        s->iface_to = parse_expr();
        expect_punct(")");
      } else {
        s->kind = StmtKind::CollCreateObject;
        s->create_name = expect_name("object name");
        if (eat_punct("[")) {
          s->create_index = parse_expr();
          expect_punct("]");
        }
        expect_punct(":");
        s->create_type = parse_type();
        expect_punct(")");
      }
      expect_punct(";");
      return s;
    }
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::Assign;
    s->span = sp;
    s->lhs = lhs;
    expect_punct(":=");
    s->rhs = parse_expr();
    expect_punct(";");
    return s;
  }

  // -------------------------------------------------------------------------
  // Declarations

  void parse_enum_block(Specification& spec) {
    expect_ident("enum");
    while (cur().kind == TokKind::Ident && !peek_ident("end")) {
      EnumDecl d;
      d.span = cur().span;
      d.name = expect_name("enum name");
      expect_punct(":");
      expect_punct("{");
      d.literals.push_back(expect_name("enum literal"));
      while (eat_punct(",")) d.literals.push_back(expect_name("enum literal"));
      expect_punct("}");
      expect_punct(";");
      for (std::size_t i = 0; i < d.literals.size(); ++i)
        for (std::size_t j = i + 1; j < d.literals.size(); ++j)
          if (d.literals[i] == d.literals[j])
            diags_.push_back(Diagnostic::error(
                "duplicate enum literal '" + d.literals[i] + "' in enum " + d.name, d.span));
      spec.enums.push_back(std::move(d));
    }
    expect_ident("end");
    expect_ident("enum");
  }

  void parse_composite_block(Specification& spec) {
    expect_ident("composite");
    while (cur().kind == TokKind::Ident && !peek_ident("end")) {
      CompositeDecl d;
      d.span = cur().span;
      d.name = expect_name("composite type name");
      expect_punct(":");
      expect_ident("record");
      expect_punct("(");
      do {
        std::string fname = expect_name("field name");
        expect_punct(":");
        d.fields.emplace_back(fname, parse_type());
      } while (eat_punct(","));
      expect_punct(")");
      expect_punct(";");
      spec.composites.push_back(std::move(d));
    }
    expect_ident("end");
    expect_ident("composite");
  }

  void parse_const_block(Specification& spec) {
    expect_ident("global");
    expect_ident("const");
    while (!peek_ident("end") && !at_end()) {
      if (eat_ident("constraint")) {
        while (!peek_ident("end") && !at_end()) {
          spec.constants.constraints.push_back(parse_expr());
          eat_punct(";");
        }
        expect_ident("end");
        expect_ident("constraint");
        continue;
      }
      ConstDecl d;
      d.span = cur().span;
      d.name = expect_name("constant name");
      expect_punct(":");
      d.type = parse_type();
      if (eat_punct(":=")) d.init = parse_expr();
      expect_punct(";");
      spec.constants.entries.push_back(std::move(d));
    }
    expect_ident("end");
    expect_ident("const");
  }

  void parse_function_block(Specification& spec) {
    expect_ident("global");
    expect_ident("function");
    while (cur().kind == TokKind::Ident && !peek_ident("end")) {
      FunctionDecl d;
      d.span = cur().span;
      d.name = expect_name("function name");
      expect_punct("(");
      if (!peek_punct(")")) {
        do {
          std::string pname = expect_name("parameter name");
          expect_punct(":");
          d.params.emplace_back(pname, parse_type());
        } while (eat_punct(","));
      }
      expect_punct(")");
      expect_punct(":");
      d.result = parse_type();
      expect_punct(":=");
      if (eat_ident("builtin")) {
        d.builtin = true;
      } else {
        d.body = parse_expr();
      }
      expect_punct(";");
      spec.functions.push_back(std::move(d));
    }
    expect_ident("end");
    expect_ident("function");
  }

  void parse_object_type(Specification& spec) {
    ObjectTypeDecl d;
    d.span = cur().span;
    d.auxiliary = eat_ident("auxiliary");
    expect_ident("object");
    expect_ident("type");
    d.name = expect_name("object type name");
    expect_punct("(");
    if (!peek_punct(")")) {
      do {
        ObjectParam p;
        if (eat_ident("in"))
          p.dir = ParamDir::In;
        else if (eat_ident("out"))
          p.dir = ParamDir::Out;
        else
          error("expected 'in' or 'out'");
        p.name = expect_name("parameter name");
        expect_punct(":");
        p.type = parse_type();
        d.params.push_back(std::move(p));
      } while (eat_punct(","));
    }
    expect_punct(")");
    if (eat_ident("cycletime")) {
      if (cur().kind == TokKind::Int) {
        d.cycletime = static_cast<int>(cur().int_val);
        advance();
      } else {
        error("expected cycletime value");
      }
    }
    expect_ident("end");
    expect_ident("type");
    spec.object_types.push_back(std::move(d));
  }

  void parse_scenario(Specification& spec) {
    expect_ident("elementary");
    expect_ident("scenario");
    ScenarioTypeDecl d;
    d.span = cur().span;
    d.name = expect_name("scenario name");
    expect_punct("(");
    if (!peek_punct(")")) {
      do {
        ScenarioParam p;
        p.is_const = eat_ident("const");
        p.name = expect_name("parameter name");
        expect_punct(":");
        p.type = parse_type();
        d.params.push_back(std::move(p));
      } while (eat_punct(","));
    }
    expect_punct(")");
    while (!peek_ident("end") && !at_end()) {
      if (eat_ident("precondition")) {
        d.precondition = parse_expr();
        expect_punct(";");
      } else if (eat_ident("spec")) {
        d.specs.push_back(parse_ltl());
        expect_punct(";");
      } else if (eat_ident("cyclebound")) {
        if (cur().kind == TokKind::Int) {
          d.cycle_bound = static_cast<int>(cur().int_val);
          advance();
        } else {
          error("expected cycle bound value");
        }
        expect_punct(";");
      } else if (eat_ident("initact")) {
        d.initact = parse_stmts();
      } else if (eat_ident("cndact")) {
        CondAction ca;
        ca.span = cur().span;
        if (eat_punct("[")) {
          ca.kind = CondKind::Guard;
          ca.condition = parse_expr();
          expect_punct("]");
        } else if (eat_ident("chg")) {
          ca.kind = CondKind::Change;
          expect_punct("(");
          ca.condition = parse_expr();
          expect_punct(")");
        } else {
          error("expected '[' guard or 'chg(' change condition");
          ca.condition = Expr::make_bool(false);
        }
        expect_punct("/");
        ca.actions = parse_stmts();
        d.cndacts.push_back(std::move(ca));
      } else {
        error("expected scenario item (precondition/spec/initact/cndact)");
        advance();
      }
    }
    expect_ident("end");
    expect_ident("scenario");
    spec.scenarios.push_back(std::move(d));
  }

  void parse_systemtest(Specification& spec) {
    expect_ident("systemtest");
    SystemTestConfig cfg;
    cfg.span = cur().span;
    expect_ident("coll");
    expect_punct(":");
    expect_ident("collaboration");
    while (!peek_ident("end") && !at_end()) {
      if (eat_ident("interface")) {
        InterfaceDecl ifd;
        ifd.span = cur().span;
        ifd.name = expect_name("interface name");
        if (eat_punct("[")) {
          ifd.index = parse_expr();
          expect_punct("]");
        }
        expect_ident("from");
        ifd.from = parse_postfix();
        expect_ident("to");
        ifd.to = parse_postfix();
        if (eat_ident("for")) {
          ifd.repl_var = expect_name("replication variable");
          expect_punct(":");
          ifd.repl_lo = parse_range_bound();
          expect_punct("..");
          ifd.repl_hi = parse_range_bound();
        }
        expect_punct(";");
        cfg.collaboration.interfaces.push_back(std::move(ifd));
      } else {
        ObjectInstanceDecl od;
        od.span = cur().span;
        od.name = expect_name("object name");
        expect_punct(":");
        od.type = parse_type();
        expect_punct(";");
        cfg.collaboration.objects.push_back(std::move(od));
      }
    }
    expect_ident("end");
    expect_ident("collaboration");
    expect_ident("schedule");
    cfg.schedule = parse_schedule_par();
    expect_ident("end");
    expect_ident("schedule");
    expect_ident("end");
    expect_ident("systemtest");
    spec.systest = std::move(cfg);
  }

  SchedulePtr parse_schedule_par() {
    std::vector<SchedulePtr> parts;
    parts.push_back(parse_schedule_term());
    while (eat_punct("||")) parts.push_back(parse_schedule_term());
    if (parts.size() == 1) return parts[0];
    auto n = std::make_shared<ScheduleNode>();
    n->kind = ScheduleKind::Par;
    n->children = std::move(parts);
    return n;
  }

  SchedulePtr parse_schedule_term() {
    if (eat_ident("par")) {
      auto n = std::make_shared<ScheduleNode>();
      n->kind = ScheduleKind::Replicate;
      n->span = cur().span;
      n->var = expect_name("replication variable");
      expect_punct(":");
      n->lo = parse_range_bound();
      expect_punct("..");
      n->hi = parse_range_bound();
      expect_punct(".");
      n->body = parse_schedule_atom();
      return n;
    }
    return parse_schedule_seq();
  }

  SchedulePtr parse_schedule_seq() {
    std::vector<SchedulePtr> parts;
    parts.push_back(parse_schedule_atom());
    while (peek_punct(";")) {
      advance();
      // trailing ';' before a closing paren or keyword
      if (peek_punct(")") || peek_punct("||") || peek_ident("end") || peek_ident("par")) break;
      parts.push_back(parse_schedule_atom());
    }
    if (parts.size() == 1) return parts[0];
    auto n = std::make_shared<ScheduleNode>();
    n->kind = ScheduleKind::Seq;
    n->children = std::move(parts);
    return n;
  }

  SchedulePtr parse_schedule_atom() {
    if (eat_punct("(")) {
      SchedulePtr inner = parse_schedule_par();
      // sequential chains may live directly inside parens
      if (peek_punct(";")) {
        std::vector<SchedulePtr> parts{inner};
        while (peek_punct(";")) {
          advance();
          if (peek_punct(")")) break;
          parts.push_back(parse_schedule_atom());
        }
        if (parts.size() > 1) {
          auto n = std::make_shared<ScheduleNode>();
          n->kind = ScheduleKind::Seq;
          n->children = std::move(parts);
          inner = n;
        }
      }
      expect_punct(")");
      return inner;
    }
    auto n = std::make_shared<ScheduleNode>();
    n->kind = ScheduleKind::Leaf;
    n->span = cur().span;
    n->scenario = expect_name("scenario name");
    expect_punct("(");
    if (!peek_punct(")")) {
      n->args.push_back(parse_expr());
      while (eat_punct(",")) n->args.push_back(parse_expr());
    }
    expect_punct(")");
    return n;
  }

  void parse_instance(Specification& spec) {
    expect_ident("instance");
    InstanceDecl d;
    d.span = cur().span;
    d.name = expect_name("instance name");
    expect_ident("of");
    expect_ident("scenario");
    d.scenario = expect_name("scenario type name");
    expect_punct("(");
    if (!peek_punct(")")) {
      do {
        std::string pname = expect_name("parameter name");
        expect_punct(":=");
        d.bindings.emplace_back(pname, parse_expr());
      } while (eat_punct(","));
    }
    expect_punct(")");
    expect_punct(";");
    spec.instances.push_back(std::move(d));
  }

  // -------------------------------------------------------------------------
  // Post passes

  // Constant folding over literals and already-valued constants, for forall
  // expansion ranges. Returns nullopt when not statically known.
  std::optional<std::int64_t> fold_const_int(const ExprPtr& e, const Specification& spec) {
    if (!e) return std::nullopt;
    switch (e->kind) {
      case ExprKind::IntLit: return e->int_val;
      case ExprKind::Ident: {
        const ConstDecl* c = spec.find_const(e->str_val);
        if (c && c->init) return fold_const_int(c->init, spec);
        return std::nullopt;
      }
      case ExprKind::Binary: {
        auto l = fold_const_int(e->args[0], spec);
        auto r = fold_const_int(e->args[1], spec);
        if (!l || !r) return std::nullopt;
        switch (e->bin_op) {
          case BinOp::Add: return *l + *r;
          case BinOp::Sub: return *l - *r;
          case BinOp::Mul: return *l * *r;
          case BinOp::Div: return *r == 0 ? std::nullopt : std::optional<std::int64_t>(*l / *r);
          case BinOp::Mod: return *r == 0 ? std::nullopt : std::optional<std::int64_t>(*l % *r);
          default: return std::nullopt;
        }
      }
      case ExprKind::Unary:
        if (e->un_op == UnOp::Neg) {
          auto v = fold_const_int(e->args[0], spec);
          return v ? std::optional<std::int64_t>(-*v) : std::nullopt;
        }
        return std::nullopt;
      default: return std::nullopt;
    }
  }

  LtlPtr expand_forall_ltl(const LtlPtr& f, const Specification& spec) {
    if (!f) return f;
    if (f->kind == LtlKind::Atom) {
      if (f->atom && f->atom->kind == ExprKind::Forall && f->lhs) {
        // quantified temporal formula: expand over the (constant) range
        auto lo = fold_const_int(f->atom->range_lo, spec);
        auto hi = fold_const_int(f->atom->range_hi, spec);
        if (!lo || !hi) {
          diags_.push_back(Diagnostic::error(
              "forall range over a temporal formula must be a bound constant range",
              f->atom->span));
          return f;
        }
        LtlPtr acc;
        for (std::int64_t i = *lo; i <= *hi; ++i) {
          std::map<std::string, ExprPtr> sub{{f->atom->bound_var, Expr::make_int(i)}};
          LtlPtr inst = ltl_subst(expand_forall_ltl(f->lhs, spec), sub);
          acc = acc ? LtlFormula::make_and(acc, inst) : inst;
        }
        return acc ? acc : LtlFormula::make_atom(Expr::make_bool(true));
      }
      return f;
    }
    auto copy = std::make_shared<LtlFormula>(*f);
    copy->lhs = expand_forall_ltl(f->lhs, spec);
    copy->rhs = expand_forall_ltl(f->rhs, spec);
    return copy;
  }

  void expand_quantified_specs(Specification& spec) {
    for (auto& sc : spec.scenarios)
      for (auto& s : sc.specs) s = expand_forall_ltl(s, spec);
  }

  TypePtr resolve_type(const TypePtr& t, const Specification& spec) {
    if (!t) return t;
    if (t->kind == TypeKind::Array) {
      return TypeExpr::array_of(resolve_type(t->elem, spec), t->size);
    }
    if (t->kind == TypeKind::List) return TypeExpr::list_of(resolve_type(t->elem, spec));
    if (t->kind == TypeKind::Set) return TypeExpr::set_of(resolve_type(t->elem, spec));
    if (t->kind == TypeKind::CompositeRef) {
      if (spec.find_enum(t->name)) return TypeExpr::named(TypeKind::EnumRef, t->name);
      if (spec.find_object_type(t->name)) return TypeExpr::named(TypeKind::ObjectRef, t->name);
      // stays CompositeRef; typecheck reports unresolved names
    }
    return t;
  }

  void resolve_named_types(Specification& spec) {
    for (auto& c : spec.composites)
      for (auto& f : c.fields) f.second = resolve_type(f.second, spec);
    for (auto& c : spec.constants.entries) c.type = resolve_type(c.type, spec);
    for (auto& f : spec.functions) {
      for (auto& p : f.params) p.second = resolve_type(p.second, spec);
      f.result = resolve_type(f.result, spec);
    }
    for (auto& o : spec.object_types)
      for (auto& p : o.params) p.type = resolve_type(p.type, spec);
    for (auto& s : spec.scenarios)
      for (auto& p : s.params) p.type = resolve_type(p.type, spec);
    if (spec.systest)
      for (auto& o : spec.systest->collaboration.objects) o.type = resolve_type(o.type, spec);
  }

  void check_duplicates(Specification& spec) {
    std::set<std::string> names;
    auto check = [&](const std::string& name, const SourceSpan& sp, const char* what) {
      if (!names.insert(name).second)
        diags_.push_back(Diagnostic::error(
            std::string("duplicate declaration of ") + what + " '" + name + "'", sp));
    };
    for (const auto& e : spec.enums) check(e.name, e.span, "enum");
    for (const auto& c : spec.composites) check(c.name, c.span, "composite type");
    for (const auto& c : spec.constants.entries) check(c.name, c.span, "constant");
    for (const auto& f : spec.functions) check(f.name, f.span, "function");
    for (const auto& o : spec.object_types) check(o.name, o.span, "object type");
    for (const auto& s : spec.scenarios) check(s.name, s.span, "scenario type");
    for (const auto& i : spec.instances) check(i.name, i.span, "instance");
  }
};

} // namespace

ParseResult parse(const std::string& source, const std::string& file) {
  ParseResult result;
  std::vector<Token> toks = lex(source, file, result.diags);
  if (has_errors(result.diags)) return result;
  Parser p(std::move(toks), result.diags);
  Specification spec = p.parse_file();
  if (!has_errors(result.diags)) result.spec = std::move(spec);
  return result;
}

ParseResult parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ParseResult r;
    r.diags.push_back(Diagnostic::error("cannot open file: " + path));
    return r;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

} // namespace scsl
