#pragma once

// Homogeneous tick-synchronized agents over the blackboard bus: the world
// agent (SUT objects + simulation scenarios), oracle agents (observer
// scenario chains), the emergent property monitor, and the test executor.
// Each agent follows the snapshot -> evaluate -> publish -> merge cycle.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "scsl/rover_world.hpp"
#include "scsl/testgen.hpp"
#include "scsl/transport.hpp"
#include "scsl/world.hpp"

namespace scsl {

enum class AgentRole { Sut, Oracle, Simulation, Executor, Coordinator, Epm };

std::string role_name(AgentRole role);
AgentRole role_from_name(const std::string& name);

struct AgentConfig {
  AgentRole role = AgentRole::Oracle;
  std::string name;
  std::string spec_path;
  std::map<std::string, std::string> const_overrides;
  std::vector<std::string> instance_names;  // hosted scenario instances
  std::string suite_path;                   // executor only
  std::string store_dir;
  double seconds_per_tick = 1.0;
  std::int64_t max_ticks = 100000;
  std::uint64_t seed = 0;

  nlohmann::ordered_json to_json() const;
  static AgentConfig from_json(const nlohmann::ordered_json& j);
};

// True when the scenario can write object parameters or mutate the
// collaboration (a simulation); observers monitor only.
bool scenario_is_simulation(const ScenarioTypeDecl& decl);

class Agent {
 public:
  Agent(AgentConfig cfg, std::shared_ptr<Bus> bus);

  Diagnostics setup();

  // one logical tick of the snapshot/evaluate/publish cycle
  void on_tick(std::int64_t tick);

  // drains the inbox into the merged input state (receiver side)
  void ingest();

  bool finished() const { return finished_; }
  bool stop_seen() const { return stop_seen_; }
  bool aborted() const { return aborted_; }
  const std::string& abort_reason() const { return abort_reason_; }
  const std::map<std::string, Verdict>& verdicts() const { return verdicts_; }
  const AgentConfig& config() const { return cfg_; }
  World* world() { return world_.get(); }
  RoverWorld* rover_model() { return rover_model_; }
  const std::vector<std::string>& log_lines() const { return log_lines_; }
  int missed_ticks() const { return missed_ticks_; }
  void note_missed_tick() { ++missed_ticks_; }

 private:
  AgentConfig cfg_;
  std::shared_ptr<Bus> bus_;
  std::unique_ptr<Specification> spec_;
  std::map<std::string, Value> consts_;
  std::unique_ptr<World> world_;
  RoverWorld* rover_model_ = nullptr;

  // merged input state: per sender, latest (seq, state)
  std::map<std::string, std::pair<std::uint64_t, nlohmann::ordered_json>> input_state_;
  // world valuations retained per tick for ordered observation
  std::map<std::int64_t, Valuation> pending_sigmas_;
  std::int64_t last_observed_tick_ = 0;
  int gap_wait_ = 0;
  std::map<std::string, std::int64_t> applied_stim_tick_;
  std::vector<TestStep> executor_steps_;
  std::size_t executor_pos_ = 0;

  std::uint64_t seq_ = 0;
  bool finished_ = false;
  bool stop_seen_ = false;
  nlohmann::ordered_json final_state_;
  std::int64_t final_world_tick_ = 0;
  // recent world states for republishing (loss healing)
  std::vector<std::pair<std::int64_t, nlohmann::ordered_json>> recent_states_;
  bool aborted_ = false;
  std::string abort_reason_;
  std::map<std::string, Verdict> verdicts_;
  std::vector<std::string> log_lines_;
  int missed_ticks_ = 0;

  void publish(std::int64_t tick, nlohmann::ordered_json state);
  void publish_at(std::int64_t envelope_tick, const nlohmann::ordered_json& state);
  Valuation snapshot_world_symbols() const;
  void world_agent_tick(std::int64_t tick);
  void oracle_agent_tick(std::int64_t tick);
  void executor_agent_tick(std::int64_t tick);
  void collect_verdicts();
  void drain_world_logs();
};

// Splits the instantiated schedule into observer chains (each becomes one
// oracle agent) and the names of world-side (simulation) instances.
struct AgentSplit {
  std::vector<std::vector<std::string>> oracle_chains;
  std::vector<std::string> world_instances;
  std::vector<std::string> epm_instances;  // emergent property monitors
};
AgentSplit split_instances(const Specification& spec,
                           const std::vector<InstanceSpec>& instances);

} // namespace scsl
