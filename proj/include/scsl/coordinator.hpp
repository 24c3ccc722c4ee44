#pragma once

// Orchestration of system test runs: the deterministic in-process mode steps
// one world directly; the UDP mode spawns agent processes on localhost,
// synchronizes a global start time, collects verdicts and logs into the
// artifact store, and aggregates the system verdict.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scsl/monitor.hpp"
#include "scsl/value.hpp"
#include "scsl/vendor_json.hpp"

namespace scsl {

struct SystestOptions {
  std::string spec_path;
  std::string suite_path;  // optional; without it the world self-initializes
  std::string mode = "inproc";  // inproc | udp
  std::map<std::string, std::string> const_overrides;
  std::string store_dir = "store/run";
  std::uint64_t seed = 0;
  double seconds_per_tick = 1.0;
  int tick_ms = 25;  // udp pacing
  std::int64_t max_ticks = 5000;
  int drop_percent = 0;
  std::string cli_path;  // executable to spawn for agent processes
  int mcast_port = 0;    // 0: derive from seed
  bool check_trace_laws = false;
};

struct SystestReport {
  std::string run_id;
  std::string mode;
  std::map<std::string, Verdict> verdicts;
  bool overall_pass = false;
  std::string verdict_text;  // "PASS within assumptions" / "FAIL: ..."
  bool aborted = false;
  std::string abort_reason;
  bool incomplete = false;  // timeout / missing agents
  int items_salvaged = 0;
  int rovers_operative = 0;
  std::int64_t ticks = 0;
  std::vector<std::string> log_lines;
  std::vector<std::string> law_violations;

  nlohmann::ordered_json to_json() const;
  static SystestReport from_json(const nlohmann::ordered_json& j);
  std::string table() const;  // human-readable verdict summary
};

SystestReport run_systest(const SystestOptions& opts);

// child-process entry for `scsl agent --config <path>`
int agent_process_main(const std::string& config_path);

std::optional<SystestReport> load_report(const std::string& run_dir);

} // namespace scsl
