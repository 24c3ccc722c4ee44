#include "scsl/coordinator.hpp"

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "scsl/agents.hpp"
#include "scsl/parser.hpp"
#include "scsl/rover_world.hpp"
#include "scsl/testgen.hpp"
#include "scsl/trace_laws.hpp"
#include "scsl/typecheck.hpp"

namespace scsl {

namespace fs = std::filesystem;

nlohmann::ordered_json SystestReport::to_json() const {
  nlohmann::ordered_json j;
  j["run_id"] = run_id;
  j["mode"] = mode;
  j["overall_pass"] = overall_pass;
  j["verdict_text"] = verdict_text;
  j["aborted"] = aborted;
  j["abort_reason"] = abort_reason;
  j["incomplete"] = incomplete;
  j["items_salvaged"] = items_salvaged;
  j["rovers_operative"] = rovers_operative;
  j["ticks"] = ticks;
  nlohmann::ordered_json verdict_map;
  for (const auto& [name, v] : verdicts) verdict_map[name] = v.str();
  j["verdicts"] = std::move(verdict_map);
  if (!law_violations.empty()) j["law_violations"] = law_violations;
  return j;
}

SystestReport SystestReport::from_json(const nlohmann::ordered_json& j) {
  SystestReport r;
  r.run_id = j.value("run_id", "");
  r.mode = j.value("mode", "");
  r.overall_pass = j.value("overall_pass", false);
  r.verdict_text = j.value("verdict_text", "");
  r.aborted = j.value("aborted", false);
  r.abort_reason = j.value("abort_reason", "");
  r.incomplete = j.value("incomplete", false);
  r.items_salvaged = j.value("items_salvaged", 0);
  r.rovers_operative = j.value("rovers_operative", 0);
  r.ticks = j.value("ticks", 0ll);
  if (j.contains("verdicts")) {
    for (auto it = j["verdicts"].begin(); it != j["verdicts"].end(); ++it) {
      std::string s = it.value().get<std::string>();
      Verdict v;
      if (s.rfind("PASS", 0) == 0) v.kind = VerdictKind::Pass;
      else if (s.rfind("FAIL", 0) == 0) {
        v.kind = VerdictKind::Fail;
        auto colon = s.find(": ");
        if (colon != std::string::npos) v.reason = s.substr(colon + 2);
      } else {
        v.kind = VerdictKind::Inconclusive;
      }
      r.verdicts[it.key()] = v;
    }
  }
  return r;
}

std::string SystestReport::table() const {
  std::ostringstream os;
  os << "run " << run_id << " (" << mode << ", " << ticks << " ticks)\n";
  std::size_t width = 8;
  for (const auto& [name, v] : verdicts) width = std::max(width, name.size());
  for (const auto& [name, v] : verdicts) {
    os << "  " << name;
    for (std::size_t i = name.size(); i < width + 2; ++i) os << ' ';
    os << v.str() << "\n";
  }
  os << "  items salvaged: " << items_salvaged
     << ", rovers operative: " << rovers_operative << "\n";
  if (aborted) os << "  ABORTED: " << abort_reason << "\n";
  if (incomplete) os << "  status: INCOMPLETE\n";
  os << "overall: " << verdict_text << "\n";
  return os.str();
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << content;
}

std::map<std::string, Value> parse_overrides(const Specification& spec,
                                             const std::map<std::string, std::string>& raw) {
  std::map<std::string, Value> overrides;
  for (const auto& [k, v] : raw) {
    const ConstDecl* decl = spec.find_const(k);
    bool is_real = decl && decl->type && decl->type->kind == TypeKind::Real;
    try {
      if (v.find('.') != std::string::npos || is_real)
        overrides[k] = Value::real(std::stod(v));
      else
        overrides[k] = Value::integer(std::stoll(v));
    } catch (const std::exception&) {
      overrides[k] = Value::token(v);
    }
  }
  return overrides;
}

void finalize_report(SystestReport& report) {
  report.overall_pass = !report.aborted && !report.incomplete;
  std::string fail_reason;
  for (const auto& [name, v] : report.verdicts) {
    (void)name;
    if (!v.pass()) {
      report.overall_pass = false;
      if (fail_reason.empty())
        fail_reason = v.reason.empty() ? "verdict failure" : v.reason;
    }
  }
  if (report.aborted)
    report.verdict_text = "FAIL: " + report.abort_reason;
  else if (report.incomplete)
    report.verdict_text = "INCOMPLETE";
  else if (report.overall_pass)
    report.verdict_text = "PASS within assumptions";
  else
    report.verdict_text = "FAIL: " + fail_reason;
}

void store_report(const SystestOptions& opts, const SystestReport& report) {
  fs::path dir(opts.store_dir);
  write_file(dir / "report.json", report.to_json().dump(2) + "\n");
  write_file(dir / "verdicts" / "verdicts.json", [&] {
    nlohmann::ordered_json j;
    for (const auto& [name, v] : report.verdicts) j[name] = v.str();
    return j.dump(2) + "\n";
  }());
  std::ostringstream log;
  for (const auto& line : report.log_lines) log << line << "\n";
  write_file(dir / "logs" / "run.log", log.str());
}

SystestReport run_inproc(const SystestOptions& opts, const Specification& spec) {
  SystestReport report;
  report.run_id = fs::path(opts.store_dir).filename().string();
  report.mode = "inproc";

  std::map<std::string, Value> consts;
  Diagnostics bc = bind_constants(spec, parse_overrides(spec, opts.const_overrides), consts);
  if (has_errors(bc)) {
    report.aborted = true;
    report.abort_reason = bc.front().message;
    finalize_report(report);
    return report;
  }

  WorldConfig wc;
  wc.seconds_per_tick = opts.seconds_per_tick;
  wc.seed = opts.seed;
  wc.max_ticks = opts.max_ticks;
  RoverWorldOptions ro;
  ro.auto_place_items = opts.suite_path.empty();
  auto model = std::make_unique<RoverWorld>(ro);
  RoverWorld* rover = model.get();
  World world(spec, consts, wc, std::move(model));
  Diagnostics sd = world.setup();
  if (has_errors(sd)) {
    report.aborted = true;
    report.abort_reason = sd.front().message;
    finalize_report(report);
    return report;
  }

  if (!opts.suite_path.empty()) {
    std::ifstream in(opts.suite_path);
    if (!in) {
      report.aborted = true;
      report.abort_reason = "cannot open suite: " + opts.suite_path;
      finalize_report(report);
      return report;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    TestSuite suite = load_suite(ss.str());
    for (const auto& c : suite.cases)
      for (const auto& s : c.steps) world.enqueue_stimulus(s.stimulation);
    fs::create_directories(fs::path(opts.store_dir));
    write_file(fs::path(opts.store_dir) / "suite.json", ss.str());
  }

  RunResult result = world.run_to_end();
  report.ticks = result.final_tick;
  report.aborted = result.aborted;
  report.abort_reason = result.abort_reason;
  report.incomplete = result.timeout;
  report.verdicts = result.verdicts;
  report.items_salvaged = rover->items_salvaged();
  report.rovers_operative = rover->rovers_operative();
  for (const auto& ev : result.events)
    if (ev.kind == WorldEvent::Kind::Log) report.log_lines.push_back(ev.text);

  if (opts.check_trace_laws) {
    TraceLawReport laws = check_trace_laws(spec, consts, result);
    if (!laws.ok()) {
      report.law_violations = laws.violations;
      report.aborted = true;
      report.abort_reason = "trace law violation";
    }
  }

  write_file(fs::path(opts.store_dir) / "trace.ndjson", trace_to_ndjson(result.trace));
  finalize_report(report);
  store_report(opts, report);
  return report;
}

struct SpawnedAgent {
  std::string name;
  pid_t pid = -1;
  bool hello = false;
  std::chrono::steady_clock::time_point last_heard;
};

SystestReport run_udp(const SystestOptions& opts, const Specification& spec) {
  SystestReport report;
  report.run_id = fs::path(opts.store_dir).filename().string();
  report.mode = "udp";

  std::map<std::string, Value> consts;
  bind_constants(spec, parse_overrides(spec, opts.const_overrides), consts);
  Diagnostics idiags;
  std::vector<InstanceSpec> instances = instantiate_schedule(spec, consts, idiags);
  AgentSplit split = split_instances(spec, instances);

  int port = opts.mcast_port > 0
                 ? opts.mcast_port
                 : 42000 + static_cast<int>((opts.seed * 37 + getpid()) % 20000);
  std::string group = "239.255.77." + std::to_string(1 + (opts.seed % 200));

  fs::path dir(opts.store_dir);
  fs::create_directories(dir / "agents");
  fs::create_directories(dir / "logs");
  if (!opts.suite_path.empty())
    fs::copy_file(opts.suite_path, dir / "suite.json", fs::copy_options::overwrite_existing);

  // roster
  struct Planned {
    AgentConfig cfg;
  };
  std::vector<Planned> roster;
  auto base_cfg = [&](AgentRole role, const std::string& name) {
    AgentConfig c;
    c.role = role;
    c.name = name;
    c.spec_path = opts.spec_path;
    c.const_overrides = opts.const_overrides;
    c.store_dir = opts.store_dir;
    c.seconds_per_tick = opts.seconds_per_tick;
    c.max_ticks = opts.max_ticks;
    c.seed = opts.seed;
    return c;
  };
  {
    AgentConfig world_cfg = base_cfg(AgentRole::Sut, "world");
    world_cfg.instance_names = split.world_instances;
    world_cfg.suite_path = opts.suite_path;
    roster.push_back({world_cfg});
  }
  for (const auto& chain : split.oracle_chains) {
    AgentConfig c = base_cfg(AgentRole::Oracle, chain.front() + "-ORA");
    c.instance_names = chain;
    roster.push_back({c});
  }
  for (const auto& epm : split.epm_instances) {
    AgentConfig c = base_cfg(AgentRole::Epm, epm + "-EPM");
    c.instance_names = {epm};
    roster.push_back({c});
  }
  if (!opts.suite_path.empty()) {
    AgentConfig c = base_cfg(AgentRole::Executor, "executor");
    c.suite_path = opts.suite_path;
    roster.push_back({c});
  }

  // expected verdict keys: every hosted instance
  std::set<std::string> expected_verdicts;
  for (const auto& p : roster)
    for (const auto& n : p.cfg.instance_names) expected_verdicts.insert(n);

  // spawn agent processes
  std::vector<SpawnedAgent> spawned;
  for (const auto& p : roster) {
    nlohmann::ordered_json cfg_json = p.cfg.to_json();
    cfg_json["mcast_group"] = group;
    cfg_json["mcast_port"] = port;
    cfg_json["tick_ms"] = opts.tick_ms;
    cfg_json["drop_percent"] = opts.drop_percent;
    fs::path cfg_path = dir / "agents" / (p.cfg.name + ".json");
    write_file(cfg_path, cfg_json.dump(2) + "\n");

    pid_t pid = fork();
    if (pid == 0) {
      execl(opts.cli_path.c_str(), opts.cli_path.c_str(), "agent", "--config",
            cfg_path.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    SpawnedAgent sa;
    sa.name = p.cfg.name;
    sa.pid = pid;
    sa.last_heard = std::chrono::steady_clock::now();
    spawned.push_back(sa);
  }

  // coordinator endpoint
  UdpBusOptions bus_opts;
  bus_opts.group = group;
  bus_opts.port = port;
  std::string bus_err;
  std::shared_ptr<Bus> bus = make_udp_bus(bus_opts, bus_err);
  if (!bus) {
    report.aborted = true;
    report.abort_reason = "coordinator bus: " + bus_err;
    finalize_report(report);
    for (auto& sa : spawned) kill(sa.pid, SIGKILL);
    return report;
  }

  auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(10);
  std::size_t hellos = 0;
  while (hellos < spawned.size() && std::chrono::steady_clock::now() < deadline) {
    while (auto msg = bus->poll()) {
      if (msg->state.contains("hello")) {
        for (auto& sa : spawned) {
          if (sa.name == msg->sender && !sa.hello) {
            sa.hello = true;
            ++hellos;
          }
        }
      }
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  if (hellos < spawned.size()) {
    std::string missing;
    for (const auto& sa : spawned)
      if (!sa.hello) missing += sa.name + " ";
    report.aborted = true;
    report.abort_reason = "agents unreachable at start: " + missing;
    finalize_report(report);
    for (auto& sa : spawned) kill(sa.pid, SIGKILL);
    while (wait(nullptr) > 0) {
    }
    store_report(opts, report);
    return report;
  }

  // global start: shared logical clock based on a common start time
  auto now_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::system_clock::now().time_since_epoch())
                    .count();
  std::int64_t t0 = now_ms + 300;
  WireMessage start;
  start.sender = "coordinator";
  start.seq = 1;
  start.state = nlohmann::ordered_json{{"ctl", "start"}, {"t0_ms", t0},
                                       {"tick_ms", opts.tick_ms}};
  for (int i = 0; i < 5; ++i) {
    start.seq = static_cast<std::uint64_t>(i + 1);
    bus->send(start);
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }

  // monitor the run
  std::map<std::string, Verdict> verdicts;
  bool eot_seen = false;
  bool world_aborted = false;
  std::string world_abort_reason;
  std::int64_t final_tick = 0;
  auto run_deadline =
      std::chrono::steady_clock::now() +
      std::chrono::milliseconds(opts.max_ticks * opts.tick_ms + 20000);
  auto soft_end = std::chrono::steady_clock::time_point::max();
  const auto silence_limit = std::chrono::milliseconds(opts.tick_ms * 400 + 5000);

  while (std::chrono::steady_clock::now() < run_deadline) {
    while (auto msg = bus->poll()) {
      for (auto& sa : spawned)
        if (sa.name == msg->sender) sa.last_heard = std::chrono::steady_clock::now();
      for (auto it = msg->state.begin(); it != msg->state.end(); ++it) {
        const std::string& key = it.key();
        if (key == "eot" && it.value().is_boolean() && it.value().get<bool>()) {
          eot_seen = true;
          if (soft_end == std::chrono::steady_clock::time_point::max())
            soft_end = std::chrono::steady_clock::now() +
                       std::chrono::milliseconds(opts.tick_ms * 40 + 2000);
        }
        if (key == "tick") final_tick = std::max<std::int64_t>(final_tick, it.value());
        if (key == "abort") {
          world_aborted = true;
          world_abort_reason = it.value().get<std::string>();
        }
        if (key == "salvaged") report.items_salvaged = it.value();
        if (key == "operative") report.rovers_operative = it.value();
        if (key.rfind("verdict:", 0) == 0) {
          std::string name = key.substr(8);
          std::string text = it.value().value("kind", "INCONCLUSIVE");
          Verdict v;
          if (text.rfind("PASS", 0) == 0) v.kind = VerdictKind::Pass;
          else if (text.rfind("FAIL", 0) == 0) {
            v.kind = VerdictKind::Fail;
            v.reason = it.value().value("reason", "");
          }
          verdicts[name] = v;
        }
      }
    }
    bool all_verdicts = true;
    for (const auto& n : expected_verdicts)
      if (!verdicts.count(n)) all_verdicts = false;
    if (eot_seen && all_verdicts) break;
    if (std::chrono::steady_clock::now() > soft_end) break;
    // liveness: an agent silent for too long fails the run
    for (const auto& sa : spawned) {
      if (std::chrono::steady_clock::now() - sa.last_heard > silence_limit) {
        report.aborted = true;
        report.abort_reason = "agent " + sa.name + " silent (liveness)";
      }
    }
    if (report.aborted) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }

  WireMessage stop;
  stop.sender = "coordinator";
  stop.state = nlohmann::ordered_json{{"ctl", "stop"}};
  for (int i = 0; i < 5; ++i) {
    stop.seq = 100 + static_cast<std::uint64_t>(i);
    bus->send(stop);
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  for (auto& sa : spawned) {
    int status = 0;
    for (int tries = 0; tries < 200; ++tries) {
      pid_t r = waitpid(sa.pid, &status, WNOHANG);
      if (r == sa.pid) {
        sa.pid = -1;
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (sa.pid != -1) {
      kill(sa.pid, SIGKILL);
      waitpid(sa.pid, &status, 0);
    }
  }

  report.verdicts = std::move(verdicts);
  report.ticks = final_tick;
  if (!eot_seen && !report.aborted) report.incomplete = true;
  for (const auto& n : expected_verdicts)
    if (!report.verdicts.count(n)) report.incomplete = true;
  if (world_aborted) {
    report.aborted = true;
    report.abort_reason = world_abort_reason;
  }

  // merge agent logs written into the store
  for (const auto& entry : fs::directory_iterator(dir / "logs")) {
    if (entry.path().extension() != ".log") continue;
    std::ifstream in(entry.path());
    std::string line;
    while (std::getline(in, line)) report.log_lines.push_back(line);
  }
  std::sort(report.log_lines.begin(), report.log_lines.end());

  finalize_report(report);
  store_report(opts, report);
  return report;
}

} // namespace

SystestReport run_systest(const SystestOptions& opts) {
  SystestReport report;
  ParseResult pr = parse_file(opts.spec_path);
  if (!pr.ok()) {
    report.aborted = true;
    report.abort_reason =
        pr.diags.empty() ? "parse failure" : pr.diags.front().message;
    finalize_report(report);
    return report;
  }
  Diagnostics tc = typecheck(*pr.spec);
  if (has_errors(tc)) {
    report.aborted = true;
    report.abort_reason = tc.front().message;
    finalize_report(report);
    return report;
  }
  if (opts.mode == "udp") return run_udp(opts, *pr.spec);
  return run_inproc(opts, *pr.spec);
}

// ---------------------------------------------------------------------------
// agent child process

int agent_process_main(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) return 3;
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(in, nullptr, false);
  if (j.is_discarded()) return 3;
  AgentConfig cfg = AgentConfig::from_json(j);
  std::string group = j.value("mcast_group", "239.255.77.42");
  int port = j.value("mcast_port", 47842);
  int tick_ms = j.value("tick_ms", 25);
  int drop_percent = j.value("drop_percent", 0);

  UdpBusOptions bus_opts;
  bus_opts.group = group;
  bus_opts.port = port;
  bus_opts.drop_percent = drop_percent;
  bus_opts.drop_seed = cfg.seed ^ std::hash<std::string>{}(cfg.name);
  std::string bus_err;
  std::shared_ptr<Bus> bus = make_udp_bus(bus_opts, bus_err);
  if (!bus) return 3;

  Agent agent(cfg, bus);
  Diagnostics sd = agent.setup();
  if (has_errors(sd)) {
    std::ofstream err(cfg.store_dir + "/logs/" + cfg.name + ".err");
    for (const auto& d : sd) err << d.str() << "\n";
    return 3;
  }

  // announce and wait for the coordinated start (beacon-loss tolerant: the
  // shared start time plus the tick period define the logical clock)
  std::int64_t t0_ms = -1;
  std::uint64_t hello_seq = 0;
  auto hello_deadline = std::chrono::steady_clock::now() + std::chrono::seconds(15);
  while (t0_ms < 0 && std::chrono::steady_clock::now() < hello_deadline) {
    WireMessage hello;
    hello.sender = cfg.name;
    hello.seq = ++hello_seq;
    hello.state = nlohmann::ordered_json{{"hello", role_name(cfg.role)}};
    bus->send(hello);
    for (int i = 0; i < 10 && t0_ms < 0; ++i) {
      while (auto msg = bus->poll()) {
        if (msg->state.value("ctl", "") == "start") {
          t0_ms = msg->state.value("t0_ms", 0ll);
          tick_ms = msg->state.value("tick_ms", tick_ms);
        }
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }
  if (t0_ms < 0) return 3;

  auto epoch_now_ms = [] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };

  std::ofstream log(cfg.store_dir + "/logs/" + cfg.name + ".log");
  bool stop = false;
  std::int64_t tick = 0;
  std::int64_t idle_ticks_after_finish = 0;
  while (!stop && tick < cfg.max_ticks) {
    std::int64_t target = t0_ms + (tick + 1) * tick_ms;
    // the kernel socket buffer is the asynchronous receiver; evaluation reads
    // a merged snapshot at each tick boundary
    while (epoch_now_ms() < target) {
      agent.ingest();
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    if (epoch_now_ms() > target + tick_ms) agent.note_missed_tick();
    agent.on_tick(tick);
    ++tick;
    (void)idle_ticks_after_finish;
    if (agent.stop_seen()) stop = true;
  }

  for (const auto& line : agent.log_lines()) log << line << "\n";
  if (agent.missed_ticks() > 0)
    log << "[agent] missed ticks: " << agent.missed_ticks() << "\n";
  nlohmann::ordered_json verdict_json;
  for (const auto& [name, v] : agent.verdicts()) verdict_json[name] = v.str();
  std::ofstream vout(cfg.store_dir + "/logs/" + cfg.name + ".verdicts.json");
  vout << verdict_json.dump(2) << "\n";
  return 0;
}

std::optional<SystestReport> load_report(const std::string& run_dir) {
  std::ifstream in(fs::path(run_dir) / "report.json");
  if (!in) return std::nullopt;
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(in, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  return SystestReport::from_json(j);
}

} // namespace scsl
