#include <sstream>

#include "scsl/parser.hpp"

namespace scsl {

namespace {

class Renderer {
 public:
  std::string run(const Specification& spec) {
    if (!spec.enums.empty()) {
      os_ << "enum\n";
      for (const auto& e : spec.enums) {
        os_ << "  " << e.name << " : { ";
        for (std::size_t i = 0; i < e.literals.size(); ++i) {
          if (i) os_ << ", ";
          os_ << e.literals[i];
        }
        os_ << " };\n";
      }
      os_ << "end enum\n\n";
    }
    if (!spec.composites.empty()) {
      os_ << "composite\n";
      for (const auto& c : spec.composites) {
        os_ << "  " << c.name << " : record( ";
        for (std::size_t i = 0; i < c.fields.size(); ++i) {
          if (i) os_ << ", ";
          os_ << c.fields[i].first << " : " << type_str(c.fields[i].second);
        }
        os_ << " );\n";
      }
      os_ << "end composite\n\n";
    }
    if (!spec.constants.entries.empty() || !spec.constants.constraints.empty()) {
      os_ << "global const\n";
      for (const auto& c : spec.constants.entries) {
        os_ << "  " << c.name << " : " << type_str(c.type);
        if (c.init) os_ << " := " << expr_str(c.init);
        os_ << ";\n";
      }
      if (!spec.constants.constraints.empty()) {
        os_ << "  constraint\n";
        for (const auto& e : spec.constants.constraints)
          os_ << "    " << expr_str(e) << ";\n";
        os_ << "  end constraint\n";
      }
      os_ << "end const\n\n";
    }
    if (!spec.functions.empty()) {
      os_ << "global function\n";
      for (const auto& f : spec.functions) {
        os_ << "  " << f.name << "( ";
        for (std::size_t i = 0; i < f.params.size(); ++i) {
          if (i) os_ << ", ";
          os_ << f.params[i].first << " : " << type_str(f.params[i].second);
        }
        os_ << " ) : " << type_str(f.result) << " :=\n    ";
        os_ << (f.builtin ? "builtin" : expr_str(f.body)) << ";\n";
      }
      os_ << "end function\n\n";
    }
    for (const auto& o : spec.object_types) {
      if (o.auxiliary) os_ << "auxiliary ";
      os_ << "object type " << o.name << "( ";
      for (std::size_t i = 0; i < o.params.size(); ++i) {
        if (i) os_ << ", ";
        os_ << (o.params[i].dir == ParamDir::In ? "in " : "out ") << o.params[i].name << " : "
            << type_str(o.params[i].type);
      }
      os_ << " )\n  cycletime " << o.cycletime << "\nend type\n\n";
    }
    for (const auto& s : spec.scenarios) render_scenario(s);
    if (spec.systest) render_systest(*spec.systest);
    for (const auto& inst : spec.instances) {
      os_ << "instance " << inst.name << " of scenario " << inst.scenario << "( ";
      for (std::size_t i = 0; i < inst.bindings.size(); ++i) {
        if (i) os_ << ", ";
        os_ << inst.bindings[i].first << " := " << expr_str(inst.bindings[i].second);
      }
      os_ << " );\n\n";
    }
    return os_.str();
  }

 private:
  std::ostringstream os_;

  void render_scenario(const ScenarioTypeDecl& s) {
    os_ << "elementary scenario " << s.name << "( ";
    for (std::size_t i = 0; i < s.params.size(); ++i) {
      if (i) os_ << ", ";
      if (s.params[i].is_const) os_ << "const ";
      os_ << s.params[i].name << " : " << type_str(s.params[i].type);
    }
    os_ << " )\n";
    if (s.precondition) os_ << "  precondition " << expr_str(s.precondition) << ";\n";
    if (s.cycle_bound) os_ << "  cyclebound " << *s.cycle_bound << ";\n";
    for (const auto& f : s.specs) os_ << "  spec " << ltl_str(f) << ";\n";
    if (!s.initact.empty()) {
      os_ << "  initact";
      render_block(s.initact, 4);
    }
    for (const auto& ca : s.cndacts) {
      os_ << "  cndact ";
      if (ca.kind == CondKind::Guard)
        os_ << "[ " << expr_str(ca.condition) << " ]";
      else
        os_ << "chg( " << expr_str(ca.condition) << " )";
      os_ << " /";
      render_block(ca.actions, 4);
    }
    os_ << "end scenario\n\n";
  }

  void render_block(const ActionBlock& block, int indent) {
    os_ << "\n";
    for (const auto& st : block) render_stmt(st, indent);
  }

  void render_stmt(const StmtPtr& st, int indent) {
    std::string pad(indent, ' ');
    switch (st->kind) {
      case StmtKind::Assign:
        os_ << pad << expr_str(st->lhs) << " := " << expr_str(st->rhs) << ";\n";
        break;
      case StmtKind::If:
        os_ << pad << "if " << expr_str(st->cond) << " then\n";
        for (const auto& t : st->then_body) render_stmt(t, indent + 2);
        if (!st->else_body.empty()) {
          os_ << pad << "else\n";
          for (const auto& t : st->else_body) render_stmt(t, indent + 2);
        }
        os_ << pad << "endif\n";
        break;
      case StmtKind::Foreach:
        os_ << pad << "foreach " << st->loop_var << " in " << expr_str(st->loop_source)
            << " do\n";
        for (const auto& t : st->loop_body) render_stmt(t, indent + 2);
        os_ << pad << "done\n";
        break;
      case StmtKind::CollDelete:
        os_ << pad << expr_str(st->loop_source) << ".delete(" << expr_str(st->lhs) << ");\n";
        break;
      case StmtKind::CollCreateObject:
        os_ << pad << expr_str(st->loop_source) << ".create(" << st->create_name;
        if (st->create_index) os_ << "[" << expr_str(st->create_index) << "]";
        os_ << " : " << type_str(st->create_type) << ");\n";
        break;
      case StmtKind::CollCreateInterface:
        os_ << pad << expr_str(st->loop_source) << ".create(interface " << st->create_name;
        if (st->create_index) os_ << "[" << expr_str(st->create_index) << "]";
        os_ << " from " << expr_str(st->iface_from) << " to " << expr_str(st->iface_to)
            << ");\n";
        break;
    }
  }

  void render_schedule(const SchedulePtr& n, int indent) {
    std::string pad(indent, ' ');
    switch (n->kind) {
      case ScheduleKind::Leaf: {
        os_ << n->scenario << "(";
        for (std::size_t i = 0; i < n->args.size(); ++i) {
          if (i) os_ << ", ";
          os_ << expr_str(n->args[i]);
        }
        os_ << ")";
        break;
      }
      case ScheduleKind::Seq: {
        os_ << "( ";
        for (std::size_t i = 0; i < n->children.size(); ++i) {
          if (i) os_ << " ; ";
          render_schedule(n->children[i], indent);
        }
        os_ << " )";
        break;
      }
      case ScheduleKind::Par: {
        for (std::size_t i = 0; i < n->children.size(); ++i) {
          if (i) os_ << "\n" << pad << "|| ";
          render_schedule(n->children[i], indent);
        }
        break;
      }
      case ScheduleKind::Replicate: {
        os_ << "par " << n->var << " : " << expr_str(n->lo) << ".." << expr_str(n->hi) << " . ";
        bool paren = n->body->kind != ScheduleKind::Leaf && n->body->kind != ScheduleKind::Seq;
        if (paren) os_ << "( ";
        render_schedule(n->body, indent);
        if (paren) os_ << " )";
        break;
      }
    }
  }

  void render_systest(const SystemTestConfig& cfg) {
    os_ << "systemtest\n  coll : collaboration\n";
    for (const auto& o : cfg.collaboration.objects)
      os_ << "    " << o.name << " : " << type_str(o.type) << ";\n";
    for (const auto& i : cfg.collaboration.interfaces) {
      os_ << "    interface " << i.name;
      if (i.index) os_ << "[" << expr_str(i.index) << "]";
      os_ << " from " << expr_str(i.from) << " to " << expr_str(i.to);
      if (!i.repl_var.empty())
        os_ << " for " << i.repl_var << " : " << expr_str(i.repl_lo) << ".."
            << expr_str(i.repl_hi);
      os_ << ";\n";
    }
    os_ << "  end collaboration\n\n  schedule\n    ";
    render_schedule(cfg.schedule, 4);
    os_ << "\n  end schedule\nend systemtest\n\n";
  }
};

} // namespace

std::string render(const Specification& spec) { return Renderer().run(spec); }

} // namespace scsl
