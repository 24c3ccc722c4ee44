#pragma once

// Directed acyclic scheduling graph over scenario instances: a synthetic
// start node reaches every instance; sequential composition contributes edge
// chains, parallel siblings hang off their common predecessor.

#include <string>
#include <vector>

#include "scsl/ast.hpp"
#include "scsl/instantiate.hpp"

namespace scsl {

struct SchedulingGraph {
  struct Node {
    std::string name;
    int instance = -1;  // index into the InstanceSpec list, -1 for start
  };
  std::vector<Node> nodes;
  std::vector<std::vector<int>> successors;
  int root = 0;

  std::vector<int> sinks() const;
  bool is_acyclic() const;
};

// Builds the graph for an instantiated schedule. Throws std::runtime_error
// on a cyclic result (cannot arise from tree-shaped schedules; guards the
// general construction).
SchedulingGraph build_scheduling_graph(const std::vector<InstanceSpec>& instances);

// All root-to-sink paths in DFS order (successors in insertion order).
std::vector<std::vector<int>> enumerate_paths(const SchedulingGraph& g);

} // namespace scsl
