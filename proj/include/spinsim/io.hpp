#pragma once

#include <iosfwd>
#include <string>

#include "spinsim/congest.hpp"
#include "spinsim/engine.hpp"
#include "spinsim/graph.hpp"
#include "spinsim/model.hpp"

#include "json.hpp"

namespace spinsim {

// Graph text format: first line "n m", then m lines "u v" with
// 0 <= u,v < n, u != v.  Errors carry the path and line number.
Graph load_graph(const std::string& path);
Graph parse_graph(std::istream& is, const std::string& name);
void write_graph(std::ostream& os, const Graph& g);

// Model JSON: {"kind": ..., "q": ..., "beta": ..., "lambda": scalar-or-array}.
// lambda is broadcast to n at bind time; length mismatches are rejected.
ModelSpec parse_model_json(const nlohmann::json& j);
ModelSpec load_model(const std::string& path);
ModelSpec bind_model(ModelSpec spec, const Graph& g);
nlohmann::json model_to_json(const ModelSpec& spec);

// Engine telemetry (full serializer, wall_ms included).
nlohmann::json telemetry_to_json(const SimulationResult& r);
nlohmann::json trace_to_json(const NetworkTrace& t);

void write_message_log_csv(std::ostream& os, const std::vector<Message>& log);

}  // namespace spinsim
