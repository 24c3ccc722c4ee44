#include "scsl/trace_laws.hpp"

#include <map>
#include <set>

#include "scsl/eval.hpp"

namespace scsl {

namespace {

struct IfaceSpec {
  std::string from;
  std::string to;
  std::int64_t dead_from = -1;  // tick from which the interface is gone
};

const Value* lookup_path(const Valuation& v, const std::string& path) {
  if (const Value* direct = v.find(path)) return direct;
  auto lb = path.rfind('[');
  if (lb == std::string::npos || path.back() != ']') return nullptr;
  const Value* arr = v.find(path.substr(0, lb));
  if (!arr || arr->kind() != ValueKind::Array) return nullptr;
  std::int64_t idx = std::atoll(path.substr(lb + 1, path.size() - lb - 2).c_str());
  if (idx < 0 || static_cast<std::size_t>(idx) >= arr->elements().size()) return nullptr;
  return &arr->elements()[static_cast<std::size_t>(idx)];
}

} // namespace

TraceLawReport check_trace_laws(const Specification& spec,
                                const std::map<std::string, Value>& consts,
                                const RunResult& result) {
  TraceLawReport report;
  const Trace& trace = result.trace;
  if (trace.empty()) return report;

  // reconstruct the initial interface wiring
  std::vector<IfaceSpec> ifaces;
  if (spec.systest) {
    for (const auto& ifd : spec.systest->collaboration.interfaces) {
      auto add_one = [&](const std::map<std::string, Value>& env) {
        std::map<std::string, Value> locals = env;
        EvalContext ctx;
        ctx.consts = &consts;
        ctx.locals = &locals;
        ctx.spec = &spec;
        try {
          IfaceSpec is;
          is.from = eval_symbol_path(ifd.from, ctx);
          is.to = eval_symbol_path(ifd.to, ctx);
          ifaces.push_back(std::move(is));
        } catch (const RuntimeError&) {
        }
      };
      if (!ifd.repl_var.empty()) {
        std::map<std::string, Value> locals;
        EvalContext ctx;
        ctx.consts = &consts;
        ctx.locals = &locals;
        ctx.spec = &spec;
        std::int64_t lo = eval_expr(ifd.repl_lo, ctx).as_int();
        std::int64_t hi = eval_expr(ifd.repl_hi, ctx).as_int();
        for (std::int64_t i = lo; i <= hi; ++i)
          add_one({{ifd.repl_var, Value::integer(i)}});
      } else {
        add_one({});
      }
    }
  }

  // deletions cut interfaces from their effect tick onward
  std::map<std::string, std::int64_t> object_death;
  for (const auto& ev : result.events) {
    if (ev.kind == WorldEvent::Kind::Mutation && ev.text.rfind("delete ", 0) == 0)
      object_death[ev.symbol] = ev.tick;
  }
  for (auto& is : ifaces) {
    for (const auto& [obj, tick] : object_death) {
      bool touches = is.from.rfind(obj + ".", 0) == 0 || is.to.rfind(obj + ".", 0) == 0;
      if (touches && (is.dead_from < 0 || tick < is.dead_from)) is.dead_from = tick;
    }
  }

  // 1. interface law: sigma_{i+1}(to) = sigma_i(from) while both ends live
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    for (const auto& is : ifaces) {
      if (is.dead_from >= 0 && trace[i + 1].tick >= is.dead_from) continue;
      const Value* from_v = lookup_path(trace[i], is.from);
      const Value* to_v = lookup_path(trace[i + 1], is.to);
      if (!from_v || !to_v) continue;
      ++report.interface_pairs_checked;
      if (from_v->compare(*to_v) != 0) {
        ++report.interface_violations;
        if (report.violations.size() < 20)
          report.violations.push_back("interface " + is.from + " -> " + is.to + " at tick " +
                                      std::to_string(trace[i].tick) + ": " + from_v->str() +
                                      " vs " + to_v->str());
      }
    }
  }

  // 2. output constancy within object cycles
  if (spec.systest) {
    for (const auto& od : spec.systest->collaboration.objects) {
      TypePtr t = od.type;
      const ObjectTypeDecl* decl =
          spec.find_object_type(t->kind == TypeKind::Array ? t->elem->name : t->name);
      if (!decl) continue;
      std::vector<std::string> names;
      if (t->kind == TypeKind::Array) {
        std::int64_t n = 0;
        const Value* arr = trace[0].find(od.name);
        if (arr && arr->kind() == ValueKind::Array)
          n = static_cast<std::int64_t>(arr->elements().size());
        for (std::int64_t i = 0; i < n; ++i)
          names.push_back(od.name + "[" + std::to_string(i) + "]");
      } else {
        names.push_back(od.name);
      }
      const int k = decl->cycletime;
      if (k <= 1) {
        // every tick is a cycle boundary; nothing to check but count the law
        for (const auto& p : decl->params)
          if (p.dir == ParamDir::Out) report.constancy_checks += names.size();
        continue;
      }
      for (const auto& name : names) {
        std::int64_t death = object_death.count(name) ? object_death[name] : -1;
        for (const auto& p : decl->params) {
          if (p.dir != ParamDir::Out) continue;
          std::string sym = name + "." + p.name;
          for (std::size_t i = 1; i < trace.size(); ++i) {
            if (death >= 0 && trace[i].tick >= death) break;
            if (trace[i].tick % k == 0) continue;  // cycle boundary
            const Value* cur = lookup_path(trace[i], sym);
            const Value* prv = lookup_path(trace[i - 1], sym);
            if (!cur || !prv) continue;
            ++report.constancy_checks;
            if (cur->compare(*prv) != 0) {
              ++report.constancy_violations;
              if (report.violations.size() < 20)
                report.violations.push_back("output " + sym + " changed mid-cycle at tick " +
                                            std::to_string(trace[i].tick));
            }
          }
        }
      }
    }
  }

  // 3. EoT exactly at the last valuation
  for (std::size_t i = 0; i < trace.size(); ++i) {
    bool eot = trace[i].eot();
    bool last = i + 1 == trace.size();
    if (eot != last && !(last && result.timeout) && !(last && result.aborted)) {
      if (eot != last) {
        report.eot_only_at_end = false;
        if (report.violations.size() < 20)
          report.violations.push_back("EoT mispositioned at tick " +
                                      std::to_string(trace[i].tick));
      }
    }
  }

  // 4. frame soundness: every object-parameter change has an attribution
  std::set<std::string> object_roots;
  if (spec.systest)
    for (const auto& od : spec.systest->collaboration.objects) object_roots.insert(od.name);
  // attribution index: (tick, symbol) -> attributed
  std::set<std::pair<std::int64_t, std::string>> attributed;
  for (const auto& ev : result.events) {
    if (ev.kind == WorldEvent::Kind::ScenarioWrite ||
        ev.kind == WorldEvent::Kind::ObjectOutput || ev.kind == WorldEvent::Kind::EngineFeed)
      attributed.insert({ev.tick, ev.symbol});
  }
  std::set<std::string> iface_targets;
  for (const auto& is : ifaces) iface_targets.insert(is.to);

  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    const Valuation& a = trace[i];
    const Valuation& b = trace[i + 1];
    for (const auto& [sym, new_v] : b.symbols) {
      auto dot = sym.find('.');
      if (dot == std::string::npos) continue;
      std::string root = sym.substr(0, sym.find_first_of(".["));
      if (!object_roots.count(root)) continue;  // instance aux, builtins
      const Value* old_v = a.find(sym);
      if (!old_v) continue;  // fresh symbol (object creation)
      auto diff_one = [&](const std::string& key, const Value& ov, const Value& nv) {
        if (ov.compare(nv) == 0) return;
        ++report.writes_checked;
        bool ok = attributed.count({b.tick, key}) || iface_targets.count(key);
        if (!ok) {
          ++report.unattributed_writes;
          if (report.violations.size() < 20)
            report.violations.push_back("unattributed change of " + key + " at tick " +
                                        std::to_string(b.tick) + ": " + ov.str() + " -> " +
                                        nv.str());
        }
      };
      if (new_v.kind() == ValueKind::Array && old_v->kind() == ValueKind::Array &&
          sym.find('[') == std::string::npos) {
        const auto& oe = old_v->elements();
        const auto& ne = new_v.elements();
        for (std::size_t j = 0; j < std::min(oe.size(), ne.size()); ++j)
          diff_one(sym + "[" + std::to_string(j) + "]", oe[j], ne[j]);
      } else {
        diff_one(sym, *old_v, new_v);
      }
    }
  }

  return report;
}

} // namespace scsl
