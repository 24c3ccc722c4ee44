#include "scsl/agents.hpp"

#include <cstdio>
#include <fstream>

#include "scsl/parser.hpp"
#include "scsl/typecheck.hpp"

namespace scsl {

std::string role_name(AgentRole role) {
  switch (role) {
    case AgentRole::Sut: return "sut";
    case AgentRole::Oracle: return "oracle";
    case AgentRole::Simulation: return "simulation";
    case AgentRole::Executor: return "executor";
    case AgentRole::Coordinator: return "coordinator";
    case AgentRole::Epm: return "epm";
  }
  return "?";
}

AgentRole role_from_name(const std::string& name) {
  if (name == "sut") return AgentRole::Sut;
  if (name == "simulation") return AgentRole::Simulation;
  if (name == "executor") return AgentRole::Executor;
  if (name == "coordinator") return AgentRole::Coordinator;
  if (name == "epm") return AgentRole::Epm;
  return AgentRole::Oracle;
}

nlohmann::ordered_json AgentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["role"] = role_name(role);
  j["name"] = name;
  j["spec_path"] = spec_path;
  j["const_overrides"] = const_overrides;
  j["instance_names"] = instance_names;
  j["suite_path"] = suite_path;
  j["store_dir"] = store_dir;
  j["seconds_per_tick"] = seconds_per_tick;
  j["max_ticks"] = max_ticks;
  j["seed"] = seed;
  return j;
}

AgentConfig AgentConfig::from_json(const nlohmann::ordered_json& j) {
  AgentConfig c;
  c.role = role_from_name(j.value("role", "oracle"));
  c.name = j.value("name", "");
  c.spec_path = j.value("spec_path", "");
  if (j.contains("const_overrides"))
    for (auto it = j["const_overrides"].begin(); it != j["const_overrides"].end(); ++it)
      c.const_overrides[it.key()] = it.value().get<std::string>();
  if (j.contains("instance_names"))
    for (const auto& n : j["instance_names"]) c.instance_names.push_back(n);
  c.suite_path = j.value("suite_path", "");
  c.store_dir = j.value("store_dir", "");
  c.seconds_per_tick = j.value("seconds_per_tick", 1.0);
  c.max_ticks = j.value("max_ticks", 100000ll);
  c.seed = j.value("seed", 0ull);
  return c;
}

bool scenario_is_simulation(const ScenarioTypeDecl& decl) {
  std::function<bool(const StmtPtr&)> writes = [&](const StmtPtr& st) -> bool {
    switch (st->kind) {
      case StmtKind::CollDelete:
      case StmtKind::CollCreateObject:
      case StmtKind::CollCreateInterface:
        return true;
      case StmtKind::Assign: {
        const Expr* root = st->lhs.get();
        while (root && (root->kind == ExprKind::Field || root->kind == ExprKind::Index))
          root = root->base.get();
        if (!root || root->kind != ExprKind::Ident) return false;
        // writes to an object-typed parameter stimulate the SUT
        for (const auto& p : decl.params) {
          if (p.name != root->str_val || !p.type) continue;
          TypePtr t = p.type->kind == TypeKind::Array ? p.type->elem : p.type;
          if (t && t->kind == TypeKind::ObjectRef) return true;
        }
        return false;
      }
      case StmtKind::If: {
        for (const auto& s : st->then_body)
          if (writes(s)) return true;
        for (const auto& s : st->else_body)
          if (writes(s)) return true;
        return false;
      }
      case StmtKind::Foreach: {
        for (const auto& s : st->loop_body)
          if (writes(s)) return true;
        return false;
      }
    }
    return false;
  };
  for (const auto& st : decl.initact)
    if (writes(st)) return true;
  for (const auto& ca : decl.cndacts)
    for (const auto& st : ca.actions)
      if (writes(st)) return true;
  return false;
}

AgentSplit split_instances(const Specification& spec,
                           const std::vector<InstanceSpec>& instances) {
  (void)spec;
  AgentSplit split;
  // group sequential chains; a chain is observer-only if no member simulates
  std::vector<int> chain_of(instances.size(), -1);
  std::vector<std::vector<int>> chains;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (instances[i].predecessor >= 0) continue;
    chain_of[i] = static_cast<int>(chains.size());
    chains.push_back({static_cast<int>(i)});
  }
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      if (chain_of[i] >= 0 || instances[i].predecessor < 0) continue;
      int pred = instances[i].predecessor;
      if (chain_of[static_cast<std::size_t>(pred)] >= 0) {
        chain_of[i] = chain_of[static_cast<std::size_t>(pred)];
        chains[static_cast<std::size_t>(chain_of[i])].push_back(static_cast<int>(i));
        grew = true;
      }
    }
  }
  for (const auto& chain : chains) {
    bool sim = false;
    for (int idx : chain)
      if (instances[static_cast<std::size_t>(idx)].decl &&
          scenario_is_simulation(*instances[static_cast<std::size_t>(idx)].decl))
        sim = true;
    std::vector<std::string> names;
    for (int idx : chain) names.push_back(instances[static_cast<std::size_t>(idx)].name);
    if (sim) {
      for (auto& n : names) split.world_instances.push_back(n);
    } else if (names.size() == 1 &&
               names[0].rfind("EmergentPropertyChecker", 0) == 0) {
      split.epm_instances.push_back(names[0]);
    } else {
      split.oracle_chains.push_back(std::move(names));
    }
  }
  return split;
}

// ---------------------------------------------------------------------------
// Agent

Agent::Agent(AgentConfig cfg, std::shared_ptr<Bus> bus)
    : cfg_(std::move(cfg)), bus_(std::move(bus)) {}

Diagnostics Agent::setup() {
  Diagnostics diags;
  ParseResult pr = parse_file(cfg_.spec_path);
  if (!pr.ok()) return pr.diags;
  spec_ = std::make_unique<Specification>(std::move(*pr.spec));
  Diagnostics tc = typecheck(*spec_);
  if (has_errors(tc)) return tc;

  std::map<std::string, Value> overrides;
  for (const auto& [k, v] : cfg_.const_overrides) {
    const ConstDecl* decl = spec_->find_const(k);
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
  Diagnostics bc = bind_constants(*spec_, overrides, consts_);
  if (has_errors(bc)) return bc;

  WorldConfig wc;
  wc.seconds_per_tick = cfg_.seconds_per_tick;
  wc.seed = cfg_.seed;
  wc.max_ticks = cfg_.max_ticks;
  for (const auto& n : cfg_.instance_names) wc.instance_filter.insert(n);

  switch (cfg_.role) {
    case AgentRole::Sut: {
      if (!wc.instance_filter.empty()) wc.force_eot_when_idle = false;
      RoverWorldOptions opts;
      opts.auto_place_items = cfg_.suite_path.empty();
      auto model = std::make_unique<RoverWorld>(opts);
      rover_model_ = model.get();
      world_ = std::make_unique<World>(*spec_, consts_, wc, std::move(model));
      Diagnostics sd = world_->setup();
      if (has_errors(sd)) return sd;
      break;
    }
    case AgentRole::Oracle:
    case AgentRole::Epm: {
      wc.record_trace = false;
      world_ = std::make_unique<World>(*spec_, consts_, wc, nullptr);
      Diagnostics sd = world_->setup();
      if (has_errors(sd)) return sd;
      break;
    }
    case AgentRole::Executor: {
      if (!cfg_.suite_path.empty()) {
        std::ifstream in(cfg_.suite_path);
        if (!in) {
          diags.push_back(Diagnostic::error("cannot open suite: " + cfg_.suite_path));
          return diags;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        TestSuite suite = load_suite(ss.str());
        for (const auto& c : suite.cases)
          for (const auto& s : c.steps) executor_steps_.push_back(s);
      }
      break;
    }
    default:
      break;
  }
  return diags;
}

void Agent::ingest() {
  if (!bus_) return;
  while (auto msg = bus_->poll()) {
    if (msg->state.is_object() && msg->state.value("ctl", "") == "stop") stop_seen_ = true;
    auto& slot = input_state_[msg->sender];
    if (msg->seq < slot.first) continue;  // stale
    if (!slot.second.is_object()) slot.second = nlohmann::ordered_json::object();
    // last-sequence-wins per sender, merged key-wise so split datagrams and
    // republished states accumulate into the latest view
    for (auto it = msg->state.begin(); it != msg->state.end(); ++it)
      slot.second[it.key()] = it.value();
    slot.first = msg->seq;
    // world valuations are additionally retained per tick (envelope tick) so
    // observers can process them in order; republished snapshots heal losses
    {
      std::int64_t t = msg->tick;
      bool has_syms = false;
      for (auto it = msg->state.begin(); it != msg->state.end(); ++it)
        if (it.key().rfind("sym:", 0) == 0) has_syms = true;
      if (has_syms && t > last_observed_tick_) {
        Valuation& v = pending_sigmas_[t];
        v.tick = t;
        for (auto it = msg->state.begin(); it != msg->state.end(); ++it)
          if (it.key().rfind("sym:", 0) == 0)
            v.symbols[it.key().substr(4)] = Value::from_json(it.value());
      }
    }
  }
}

void Agent::publish(std::int64_t tick, nlohmann::ordered_json state) {
  if (!bus_) return;
  WireMessage m;
  m.sender = cfg_.name;
  m.tick = tick;
  m.seq = ++seq_;
  m.state = std::move(state);
  bus_->send(m);
}

void Agent::publish_at(std::int64_t envelope_tick, const nlohmann::ordered_json& state) {
  if (!bus_) return;
  WireMessage m;
  m.sender = cfg_.name;
  m.tick = envelope_tick;
  m.seq = ++seq_;
  m.state = state;
  bus_->send(m);
}

Valuation Agent::snapshot_world_symbols() const {
  Valuation v;
  for (const auto& [sender, slot] : input_state_) {
    (void)sender;
    const auto& state = slot.second;
    if (!state.is_object()) continue;
    for (auto it = state.begin(); it != state.end(); ++it) {
      const std::string& key = it.key();
      if (key.rfind("sym:", 0) == 0)
        v.symbols[key.substr(4)] = Value::from_json(it.value());
      if (key == "tick") v.tick = it.value().get<std::int64_t>();
    }
  }
  return v;
}

void Agent::drain_world_logs() {
  if (!world_) return;
  // pull fresh log events for the store
  for (const auto& ev : world_->instances()) (void)ev;
}

void Agent::world_agent_tick(std::int64_t tick) {
  (void)tick;
  if (finished_) {
    // republish the final state so a lost datagram cannot strand observers
    if (final_state_.is_object()) publish_at(final_world_tick_, final_state_);
    return;
  }
  if (!world_) {
    finished_ = true;
    return;
  }
  // apply executor stimulation received since the last tick
  for (auto& [sender, slot] : input_state_) {
    auto& state = slot.second;
    if (!state.is_object()) continue;
    if (state.contains("stim_hist") && state["stim_hist"].is_object()) {
      // cumulative history: zero-padded step index -> stimulation map; a lost
      // datagram heals on the next publish
      for (auto it = state["stim_hist"].begin(); it != state["stim_hist"].end(); ++it) {
        std::int64_t index = std::atoll(it.key().c_str());
        if (index <= applied_stim_tick_[sender]) continue;
        applied_stim_tick_[sender] = index;
        std::map<std::string, Value> stim;
        for (auto s = it.value().begin(); s != it.value().end(); ++s)
          stim[s.key()] = Value::from_json(s.value());
        if (!stim.empty()) world_->enqueue_stimulus(stim);
      }
    }
    if (state.contains("eot_request") && state["eot_request"].is_boolean() &&
        state["eot_request"].get<bool>())
      world_->request_eot();
    // framed writes from remote simulation agents
    for (auto it = state.begin(); it != state.end(); ++it) {
      if (it.key().rfind("wr:", 0) != 0) continue;
      std::string rest = it.key().substr(3);
      auto sep = rest.find(':');
      if (sep == std::string::npos) continue;
      world_->inject_scenario_write(rest.substr(0, sep), rest.substr(sep + 1),
                                    Value::from_json(it.value()));
    }
  }

  bool more = world_->step();

  // publish the full valuation
  nlohmann::ordered_json state;
  state["tick"] = world_->tick();
  for (const auto& [sym, val] : world_->sigma().symbols) state["sym:" + sym] = val.to_json();
  if (rover_model_) {
    state["salvaged"] = rover_model_->items_salvaged();
    state["operative"] = rover_model_->rovers_operative();
  }
  if (!more) {
    state["eot"] = true;
    if (world_->aborted()) {
      aborted_ = true;
      abort_reason_ = "world aborted";
      state["abort"] = abort_reason_;
    }
    collect_verdicts();
    if (!abort_reason_.empty()) state["abort"] = abort_reason_;
    for (const auto& [name, v] : verdicts_) {
      state["verdict:" + name] =
          nlohmann::ordered_json{{"kind", v.str()}, {"reason", v.reason}};
    }
    finished_ = true;
    final_state_ = state;
    final_world_tick_ = world_->tick();
  }
  (void)tick;
  publish_at(world_->tick(), state);
  // idempotent snapshots republished: the two previous valuations ride along
  // each tick so a lost datagram cannot erase a short-lived state
  for (const auto& [t, s] : recent_states_) publish_at(t, s);
  recent_states_.emplace_back(world_->tick(), std::move(state));
  if (recent_states_.size() > 2) recent_states_.erase(recent_states_.begin());
}

void Agent::oracle_agent_tick(std::int64_t tick) {
  if (!world_) return;
  if (finished_) {
    if (final_state_.is_object()) publish(tick, final_state_);
    return;
  }
  // ordered observation with catch-up: every world valuation is consumed
  // exactly once; a persistent gap (datagram loss) is jumped after a grace
  bool saw_eot = false;
  int processed = 0;
  while (!pending_sigmas_.empty() && processed < 64) {
    auto first = pending_sigmas_.begin();
    if (last_observed_tick_ > 0 && first->first > last_observed_tick_ + 1 && gap_wait_ < 3) {
      ++gap_wait_;
      break;
    }
    gap_wait_ = 0;
    Valuation sigma = std::move(first->second);
    pending_sigmas_.erase(first);
    if (sigma.tick <= last_observed_tick_) continue;
    last_observed_tick_ = sigma.tick;
    world_->observe_external(sigma);
    ++processed;
    if (sigma.eot() || world_->ended() || world_->aborted()) {
      saw_eot = true;
      break;
    }
  }
  nlohmann::ordered_json state;
  state["heartbeat"] = tick;
  if (world_->eot_pending()) state["eot_request"] = true;
  if (saw_eot) {
    finished_ = true;
    collect_verdicts();
    for (const auto& [name, v] : verdicts_)
      state["verdict:" + name] =
          nlohmann::ordered_json{{"kind", v.str()}, {"reason", v.reason}};
    final_state_ = state;
  }
  publish(tick, std::move(state));
}

void Agent::executor_agent_tick(std::int64_t tick) {
  nlohmann::ordered_json state;
  state["heartbeat"] = tick;
  if (executor_pos_ < executor_steps_.size()) ++executor_pos_;
  else finished_ = true;
  nlohmann::ordered_json hist = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < executor_pos_; ++i) {
    char key[8];
    std::snprintf(key, sizeof key, "%05zu", i + 1);
    nlohmann::ordered_json stim = nlohmann::ordered_json::object();
    for (const auto& [k, v] : executor_steps_[i].stimulation) stim[k] = v.to_json();
    hist[key] = std::move(stim);
  }
  state["stim_hist"] = std::move(hist);
  publish(tick, std::move(state));
}

void Agent::collect_verdicts() {
  if (!world_) return;
  RunResult r = world_->take_result();
  for (auto& [name, v] : r.verdicts) verdicts_[name] = v;
  for (const auto& ev : r.events)
    if (ev.kind == WorldEvent::Kind::Log) log_lines_.push_back(ev.text);
  if (r.aborted) {
    aborted_ = true;
    abort_reason_ = r.abort_reason;
  }
}

void Agent::on_tick(std::int64_t tick) {
  ingest();
  switch (cfg_.role) {
    case AgentRole::Sut: world_agent_tick(tick); break;
    case AgentRole::Oracle:
    case AgentRole::Epm: oracle_agent_tick(tick); break;
    case AgentRole::Executor: executor_agent_tick(tick); break;
    default: break;
  }
  ingest();
}

} // namespace scsl
