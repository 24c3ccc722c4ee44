#include "scsl/sched_graph.hpp"

#include <functional>
#include <stdexcept>

namespace scsl {

std::vector<int> SchedulingGraph::sinks() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (successors[i].empty()) out.push_back(static_cast<int>(i));
  return out;
}

bool SchedulingGraph::is_acyclic() const {
  std::vector<int> state(nodes.size(), 0);  // 0 new, 1 visiting, 2 done
  std::function<bool(int)> visit = [&](int v) -> bool {
    state[static_cast<std::size_t>(v)] = 1;
    for (int s : successors[static_cast<std::size_t>(v)]) {
      if (state[static_cast<std::size_t>(s)] == 1) return false;
      if (state[static_cast<std::size_t>(s)] == 0 && !visit(s)) return false;
    }
    state[static_cast<std::size_t>(v)] = 2;
    return true;
  };
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (state[i] == 0 && !visit(static_cast<int>(i))) return false;
  return true;
}

SchedulingGraph build_scheduling_graph(const std::vector<InstanceSpec>& instances) {
  SchedulingGraph g;
  g.nodes.push_back({"start", -1});
  g.successors.emplace_back();
  std::vector<int> node_of(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    node_of[i] = static_cast<int>(g.nodes.size());
    g.nodes.push_back({instances[i].name, static_cast<int>(i)});
    g.successors.emplace_back();
  }
  for (std::size_t i = 0; i < instances.size(); ++i) {
    int pred = instances[i].predecessor;
    int from = pred >= 0 ? node_of[static_cast<std::size_t>(pred)] : g.root;
    g.successors[static_cast<std::size_t>(from)].push_back(node_of[i]);
  }
  if (!g.is_acyclic()) throw std::runtime_error("scheduling graph has a cycle");
  return g;
}

std::vector<std::vector<int>> enumerate_paths(const SchedulingGraph& g) {
  std::vector<std::vector<int>> paths;
  std::vector<int> current;
  std::function<void(int)> dfs = [&](int v) {
    current.push_back(v);
    const auto& succ = g.successors[static_cast<std::size_t>(v)];
    if (succ.empty()) {
      paths.push_back(current);
    } else {
      for (int s : succ) dfs(s);
    }
    current.pop_back();
  };
  dfs(g.root);
  return paths;
}

} // namespace scsl
