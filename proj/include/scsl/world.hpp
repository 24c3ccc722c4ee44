#pragma once

// The tick-synchronized execution engine: valuations, object execution
// cycles, interface propagation, scenario lifecycle, frames,
// condition-actions, dynamic collaboration mutation, and per-instance
// monitors.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scsl/ast.hpp"
#include "scsl/eval.hpp"
#include "scsl/instantiate.hpp"
#include "scsl/monitor.hpp"
#include "scsl/valuation.hpp"

namespace scsl {

class World;

// Pluggable system-under-test behaviour: reads the current valuation and
// stages writes for the next tick through the World interface.
class SutModel {
 public:
  virtual ~SutModel() = default;
  virtual void init(World&) {}
  // one suite stimulation step (world-control symbols)
  virtual void apply_stimulus(World&, const std::map<std::string, Value>&) {}
  virtual void tick(World&) {}
  virtual std::vector<std::string> drain_logs() { return {}; }
};

enum class Lifecycle { Passive, Runnable, Active, Terminated };

struct WorldEvent {
  std::int64_t tick = 0;
  enum class Kind {
    Activation,
    Deactivation,
    Mutation,
    ScenarioWrite,  // framed parameter write, with instance attribution
    ObjectOutput,   // object's own cycle output
    EngineFeed,     // engine-provided input (physics/GPS, executor stimuli)
    Log,
    Timeout,
    Abort,
  } kind = Kind::Log;
  std::string instance;
  std::string symbol;
  std::string text;
};

struct MonitorSlot {
  LtlPtr formula;
  std::unique_ptr<Monitor> monitor;     // null for engine-enforced formulas
  ExprPtr termination_cond;             // G(cond => X !active) premise
  bool eot_pattern = false;             // G(cond => X EoT)
};

struct ScenarioRuntime {
  InstanceSpec spec;
  Lifecycle lifecycle = Lifecycle::Passive;
  std::int64_t activation_tick = -1;
  std::map<std::string, Value> aux;  // auxiliary variables incl. frame
  std::map<std::string, Value> aux_snapshot;  // aux as of sigma_i, for condition eval
  std::vector<MonitorSlot> monitors;
  std::vector<std::optional<bool>> chg_prev;  // per cndact previous value
  bool deactivate_next = false;
  Verdict verdict;
  bool finalized = false;
};

struct ObjectRuntime {
  std::string name;
  const ObjectTypeDecl* decl = nullptr;
  bool alive = true;
  int phase = 0;  // 0 at a cycle start
  std::map<std::string, Value> latched_inputs;   // in-param name -> value
  std::map<std::string, Value> pending_outputs;  // staged until the cycle boundary
};

struct InterfaceRuntime {
  std::string id;
  std::string from;
  std::string to;
};

struct WorldConfig {
  double seconds_per_tick = 1.0;
  std::uint64_t seed = 0;
  std::int64_t max_ticks = 100000;
  bool stress_permute_mutations = false;
  bool record_trace = true;
  // force EoT when no instance is runnable or active (off for distributed
  // worlds whose observers run remotely)
  bool force_eot_when_idle = true;
  // when non-empty, only the named scenario instances are hosted
  std::set<std::string> instance_filter;
};

struct RunResult {
  Trace trace;
  std::vector<WorldEvent> events;
  std::map<std::string, Verdict> verdicts;  // instance -> final verdict
  bool aborted = false;
  std::string abort_reason;
  bool timeout = false;
  std::int64_t final_tick = 0;
};

class World {
 public:
  World(const Specification& spec, std::map<std::string, Value> consts, WorldConfig cfg,
        std::unique_ptr<SutModel> sut);

  Diagnostics setup();

  // advances one observation tick; false once EoT has been published or the
  // run aborted
  bool step();

  RunResult run_to_end();
  RunResult take_result();

  // current valuation sigma_i
  const Valuation& sigma() const { return sigma_; }
  std::int64_t tick() const { return tick_; }
  bool ended() const { return ended_; }
  bool aborted() const { return aborted_; }

  const Specification& spec() const { return spec_; }
  const std::map<std::string, Value>& consts() const { return consts_; }
  const WorldConfig& config() const { return cfg_; }
  const std::vector<ScenarioRuntime>& instances() const { return instances_; }
  const std::vector<ObjectRuntime>& objects() const { return objects_; }
  const std::vector<InterfaceRuntime>& interfaces() const { return interfaces_; }

  // --- write surface for SUT models and the executor (visible next tick) ---
  // object's own cycle output (held constant within cycles)
  void stage_object_output(const std::string& obj, const std::string& param_path, Value v);
  // setup-time write into sigma_0 (valid before the first step)
  void seed_symbol(const std::string& path, Value v);
  // engine-provided input feed (GPS position, test-control inputs)
  void stage_engine_feed(const std::string& symbol_path, Value v);
  void log_line(const std::string& text);
  void post_event(WorldEvent ev);
  // queue one suite stimulation step; applied at the next step()
  void enqueue_stimulus(const std::map<std::string, Value>& stim);

  // merged framed writes from external (distributed) simulation agents
  void inject_scenario_write(const std::string& instance, const std::string& symbol, Value v);

  // runs instance monitors against an externally produced valuation instead
  // of stepping objects (oracle-agent mode)
  void observe_external(const Valuation& sigma);

  ObjectRuntime* find_object(const std::string& name);
  // an engine-enforced EoT pattern or an EoT assignment fired this tick
  bool eot_pending() const { return eot_next_; }
  void request_eot() { eot_next_ = true; }
  const Value* symbol(const std::string& path) const { return sigma_.find(path); }

 private:
  const Specification& spec_;
  std::map<std::string, Value> consts_;
  WorldConfig cfg_;
  std::unique_ptr<SutModel> sut_;

  std::int64_t tick_ = 0;
  bool ended_ = false;
  bool aborted_ = false;
  std::string abort_reason_;
  bool timeout_ = false;

  Valuation sigma_;
  Trace trace_;
  std::vector<WorldEvent> events_;
  std::vector<ScenarioRuntime> instances_;
  std::vector<ObjectRuntime> objects_;
  std::vector<InterfaceRuntime> interfaces_;
  std::vector<std::map<std::string, Value>> stimuli_queue_;

  // staged effects for sigma_{i+1}
  std::map<std::string, Value> staged_inputs_;
  std::map<std::string, std::pair<std::string, Value>> staged_scenario_writes_;  // path -> (instance, value)
  std::vector<std::pair<std::string, ActionEffects::Mutation>> staged_mutations_;
  bool eot_next_ = false;

  void build_collaboration(Diagnostics& diags);
  void build_instances(Diagnostics& diags);
  void seed_initial_valuation();

  void write_symbol(Valuation& v, const std::string& path, const Value& val);
  void remove_object_symbols(Valuation& v, const std::string& name);

  EvalContext instance_ctx(ScenarioRuntime& inst, const Valuation& sigma);
  EvalContext snapshot_ctx(ScenarioRuntime& inst, const Valuation& sigma);
  std::set<std::string> default_frame(const ScenarioRuntime& inst) const;
  bool eval_precondition(ScenarioRuntime& inst, const Valuation& sigma);
  void run_actions(ScenarioRuntime& inst, const ActionBlock& block, const Valuation& sigma);
  void process_activations(const Valuation& prev, Valuation& next);
  void process_condition_actions(const Valuation& prev);
  void process_terminations(const Valuation& prev, Valuation& next);
  void apply_staged(Valuation& next);
  void apply_mutations(Valuation& next);
  void advance_object_cycles(const Valuation& prev, Valuation& next);
  void feed_monitors(const Valuation& v);
  void finalize_instance(ScenarioRuntime& inst);
  void finalize_all();
  void abort_run(const std::string& reason);
  void publish_instance_symbols(Valuation& v);
};

// Classifies a spec formula: G(cond => X !active) or G(cond => X EoT)
// patterns are engine-enforced; returns the premise when matched.
ExprPtr match_termination_pattern(const LtlPtr& f, bool& is_eot);

} // namespace scsl
