#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "scsl/value.hpp"

namespace scsl {

// Per-tick symbol-to-value map. Symbol names are fully qualified flat paths:
// object parameters "r[2].s", array views "r", instance auxiliaries
// "Approach3.aux_isLoaded", the builtins "EoT" and "t_hat".
struct Valuation {
  std::int64_t tick = 0;
  std::map<std::string, Value> symbols;

  const Value* find(const std::string& name) const {
    auto it = symbols.find(name);
    return it == symbols.end() ? nullptr : &it->second;
  }
  void set(const std::string& name, Value v) { symbols[name] = std::move(v); }
  double t_hat() const {
    const Value* v = find("t_hat");
    return v ? v->as_real() : 0.0;
  }
  bool eot() const {
    const Value* v = find("EoT");
    return v && v->kind() == ValueKind::Bool && v->as_bool();
  }

  nlohmann::ordered_json to_json() const;
  static Valuation from_json(const nlohmann::ordered_json& j);
};

using Trace = std::vector<Valuation>;

std::string trace_to_ndjson(const Trace& trace);
Trace trace_from_ndjson(const std::string& text);

} // namespace scsl
