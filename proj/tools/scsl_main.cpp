// scsl — SCenario Specification Language toolchain.
//
// Subcommands: check (parse + typecheck), gen (test-suite generation),
// systest (run a system test in-process or distributed over UDP), report
// (summarize a run directory), monitor (replay a trace against scenario
// monitors), simulate (run the world standalone), and agent (internal:
// spawned by the coordinator in UDP mode).
//
// Exit codes: 0 all PASS, 1 any FAIL, 2 usage/spec error, 3 infrastructure
// abort.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "scsl/coordinator.hpp"
#include "scsl/eval.hpp"
#include "scsl/instantiate.hpp"
#include "scsl/parser.hpp"
#include "scsl/rover_world.hpp"
#include "scsl/testgen.hpp"
#include "scsl/trace_laws.hpp"
#include "scsl/typecheck.hpp"
#include "scsl/world.hpp"

namespace {

using namespace scsl;

std::map<std::string, std::string> parse_set_flags(const std::vector<std::string>& sets,
                                                   bool& ok) {
  std::map<std::string, std::string> out;
  ok = true;
  for (const auto& s : sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: --set expects name=value, got '" << s << "'\n";
      ok = false;
      continue;
    }
    out[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return out;
}

int cmd_check(const std::string& path) {
  std::ifstream probe(path);
  if (!probe) {
    std::cerr << "error: cannot open " << path << "\n";
    return 2;
  }
  ParseResult pr = parse_file(path);
  if (!pr.ok()) {
    for (const auto& d : pr.diags) std::cerr << d.str() << "\n";
    return 1;
  }
  Diagnostics tc = typecheck(*pr.spec);
  for (const auto& d : tc) std::cerr << d.str() << "\n";
  if (has_errors(tc)) return 1;
  std::cout << "ok: " << path << " (" << pr.spec->scenarios.size() << " scenario types, "
            << pr.spec->object_types.size() << " object types)\n";
  return 0;
}

int cmd_gen(const std::string& path, const std::string& out,
            const std::map<std::string, std::string>& sets, std::uint64_t seed,
            int max_depth, int max_paths) {
  ParseResult pr = parse_file(path);
  if (!pr.ok()) {
    for (const auto& d : pr.diags) std::cerr << d.str() << "\n";
    return 2;
  }
  Diagnostics tc = typecheck(*pr.spec);
  if (has_errors(tc)) {
    for (const auto& d : tc) std::cerr << d.str() << "\n";
    return 2;
  }
  std::map<std::string, Value> overrides;
  for (const auto& [k, v] : sets) {
    const ConstDecl* decl = pr.spec->find_const(k);
    bool is_real = decl && decl->type && decl->type->kind == TypeKind::Real;
    try {
      overrides[k] = (v.find('.') != std::string::npos || is_real)
                         ? Value::real(std::stod(v))
                         : Value::integer(std::stoll(v));
    } catch (const std::exception&) {
      overrides[k] = Value::token(v);
    }
  }
  std::map<std::string, Value> consts;
  Diagnostics bc = bind_constants(*pr.spec, overrides, consts);
  if (has_errors(bc)) {
    for (const auto& d : bc) std::cerr << d.str() << "\n";
    return 2;
  }
  GenBudget budget;
  budget.max_depth = max_depth;
  budget.max_paths = max_paths;
  Diagnostics gd;
  TestSuite suite = generate(*pr.spec, consts, seed, budget, gd);
  std::string text = serialize_suite(suite);
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    std::ofstream os(out);
    if (!os) {
      std::cerr << "error: cannot write " << out << "\n";
      return 2;
    }
    os << text;
    std::cout << "wrote " << out << " (" << suite.cases.size() << " cases)\n";
  }
  if (!suite.complete)
    std::cerr << "warning: suite incomplete (budget)\n";
  for (const auto& rline : suite.reports) std::cerr << "note: " << rline << "\n";
  return 0;
}

int cmd_systest(SystestOptions opts, bool json_out) {
  SystestReport report = run_systest(opts);
  if (json_out)
    std::cout << report.to_json().dump(2) << "\n";
  else
    std::cout << report.table();
  if (report.aborted) return 3;
  if (!report.overall_pass) return 1;
  return 0;
}

int cmd_report(const std::string& dir, bool json_out) {
  auto report = load_report(dir);
  if (!report) {
    std::cerr << "error: no report.json under " << dir << "\n";
    return 2;
  }
  if (json_out)
    std::cout << report->to_json().dump(2) << "\n";
  else
    std::cout << report->table();
  if (report->incomplete) return 1;
  return report->overall_pass ? 0 : 1;
}

int cmd_monitor(const std::string& spec_path, const std::string& trace_path,
                const std::string& instance_filter) {
  ParseResult pr = parse_file(spec_path);
  if (!pr.ok()) {
    for (const auto& d : pr.diags) std::cerr << d.str() << "\n";
    return 2;
  }
  Diagnostics tc = typecheck(*pr.spec);
  if (has_errors(tc)) {
    for (const auto& d : tc) std::cerr << d.str() << "\n";
    return 2;
  }
  std::ifstream in(trace_path);
  if (!in) {
    std::cerr << "error: cannot open trace " << trace_path << "\n";
    return 2;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  Trace trace = trace_from_ndjson(ss.str());
  if (trace.empty()) {
    std::cerr << "error: empty trace\n";
    return 2;
  }
  std::map<std::string, Value> consts;
  bind_constants(*pr.spec, {}, consts);
  WorldConfig wc;
  wc.record_trace = false;
  if (!instance_filter.empty()) wc.instance_filter.insert(instance_filter);
  World world(*pr.spec, consts, wc, nullptr);
  Diagnostics sd = world.setup();
  if (has_errors(sd)) {
    for (const auto& d : sd) std::cerr << d.str() << "\n";
    return 2;
  }
  for (std::size_t i = 1; i < trace.size(); ++i) world.observe_external(trace[i]);
  RunResult result = world.take_result();
  bool any_fail = false;
  for (const auto& [name, v] : result.verdicts) {
    std::cout << name << ": " << v.str() << "\n";
    if (v.fail()) any_fail = true;
  }
  return any_fail ? 1 : 0;
}

int cmd_simulate(const std::string& spec_path, std::int64_t ticks,
                 const std::map<std::string, std::string>& sets,
                 const std::string& trace_out, std::uint64_t seed) {
  SystestOptions opts;
  opts.spec_path = spec_path;
  opts.mode = "inproc";
  opts.const_overrides = sets;
  opts.max_ticks = ticks;
  opts.seed = seed;
  opts.store_dir = trace_out.empty() ? std::string("store/simulate") : trace_out;
  SystestReport report = run_systest(opts);
  std::cout << report.table();
  return report.aborted ? 3 : 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"SCenario Specification Language toolchain"};
  app.require_subcommand(1);

  // check
  std::string check_path;
  auto* check = app.add_subcommand("check", "parse and typecheck a specification");
  check->add_option("file", check_path, "specification file (.scsl)")->required();

  // gen
  std::string gen_path, gen_out;
  std::vector<std::string> gen_sets;
  std::uint64_t gen_seed = 0;
  int gen_depth = 12, gen_paths = 256;
  auto* gen = app.add_subcommand("gen", "generate a test suite");
  gen->add_option("file", gen_path)->required();
  gen->add_option("--out,-o", gen_out, "output suite file (default stdout)");
  gen->add_option("--seed", gen_seed);
  gen->add_option("--set", gen_sets, "override a global constant: name=value");
  gen->add_option("--budget-depth", gen_depth);
  gen->add_option("--budget-paths", gen_paths);

  // systest
  SystestOptions sopts;
  std::vector<std::string> sys_sets;
  bool sys_json = false;
  auto* sys = app.add_subcommand("systest", "run a system test");
  sys->add_option("file", sopts.spec_path)->required();
  sys->add_option("--suite", sopts.suite_path, "test suite JSON to replay");
  sys->add_option("--mode", sopts.mode, "inproc | udp")->default_val("inproc");
  sys->add_option("--seed", sopts.seed);
  sys->add_option("--set", sys_sets, "override a global constant: name=value");
  sys->add_option("--out-dir", sopts.store_dir, "artifact store directory");
  sys->add_option("--tick-seconds", sopts.seconds_per_tick, "test time per tick");
  sys->add_option("--tick-ms", sopts.tick_ms, "wall-clock tick period (udp)");
  sys->add_option("--max-ticks", sopts.max_ticks);
  sys->add_option("--drop-pct", sopts.drop_percent, "induced datagram loss (udp)");
  sys->add_flag("--check-laws", sopts.check_trace_laws, "verify trace laws after the run");
  sys->add_flag("--json", sys_json);

  // report
  std::string report_dir;
  bool report_json = false;
  auto* rep = app.add_subcommand("report", "summarize a run directory");
  rep->add_option("dir", report_dir)->required();
  rep->add_flag("--json", report_json);

  // monitor
  std::string mon_spec, mon_trace, mon_instance;
  auto* mon = app.add_subcommand("monitor", "replay a trace against scenario monitors");
  mon->add_option("file", mon_spec)->required();
  mon->add_option("--trace", mon_trace)->required();
  mon->add_option("--instance", mon_instance, "restrict to one instance");

  // simulate
  std::string sim_spec, sim_out;
  std::vector<std::string> sim_sets;
  std::int64_t sim_ticks = 1000;
  std::uint64_t sim_seed = 0;
  auto* sim = app.add_subcommand("simulate", "run the world without a suite");
  sim->add_option("file", sim_spec)->required();
  sim->add_option("--ticks", sim_ticks);
  sim->add_option("--set", sim_sets);
  sim->add_option("--out-dir", sim_out);
  sim->add_option("--seed", sim_seed);

  // agent (internal)
  std::string agent_config;
  auto* agent = app.add_subcommand("agent", "internal: run one distributed agent");
  agent->add_option("--config", agent_config)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*check) return cmd_check(check_path);
    if (*gen) {
      bool ok = true;
      auto sets = parse_set_flags(gen_sets, ok);
      if (!ok) return 2;
      return cmd_gen(gen_path, gen_out, sets, gen_seed, gen_depth, gen_paths);
    }
    if (*sys) {
      bool ok = true;
      auto sets = parse_set_flags(sys_sets, ok);
      if (!ok) return 2;
      sopts.const_overrides = sets;
      sopts.cli_path = argv[0];
      return cmd_systest(sopts, sys_json);
    }
    if (*rep) return cmd_report(report_dir, report_json);
    if (*mon) return cmd_monitor(mon_spec, mon_trace, mon_instance);
    if (*sim) {
      bool ok = true;
      auto sets = parse_set_flags(sim_sets, ok);
      if (!ok) return 2;
      return cmd_simulate(sim_spec, sim_ticks, sets, sim_out, sim_seed);
    }
    if (*agent) return agent_process_main(agent_config);
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
