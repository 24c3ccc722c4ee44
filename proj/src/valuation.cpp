#include "scsl/valuation.hpp"

#include <sstream>

namespace scsl {

nlohmann::ordered_json Valuation::to_json() const {
  nlohmann::ordered_json j;
  j["tick"] = tick;
  j["t_hat"] = t_hat();
  nlohmann::ordered_json syms;
  for (const auto& [k, v] : symbols) syms[k] = v.to_json();
  j["symbols"] = std::move(syms);
  return j;
}

Valuation Valuation::from_json(const nlohmann::ordered_json& j) {
  Valuation v;
  v.tick = j.value("tick", 0);
  if (j.contains("symbols"))
    for (auto it = j["symbols"].begin(); it != j["symbols"].end(); ++it)
      v.symbols[it.key()] = Value::from_json(it.value());
  return v;
}

std::string trace_to_ndjson(const Trace& trace) {
  std::ostringstream os;
  for (const auto& v : trace) os << v.to_json().dump() << "\n";
  return os.str();
}

Trace trace_from_ndjson(const std::string& text) {
  Trace t;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    t.push_back(Valuation::from_json(nlohmann::ordered_json::parse(line)));
  }
  return t;
}

} // namespace scsl
