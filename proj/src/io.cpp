#include "spinsim/io.hpp"

#include <fstream>
#include <sstream>

#include "spinsim/errors.hpp"

namespace spinsim {

Graph parse_graph(std::istream& is, const std::string& name) {
    std::string line;
    int lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(is, line)) {
            ++lineno;
            // allow blank lines and '#' comments
            std::size_t i = line.find_first_not_of(" \t\r");
            if (i == std::string::npos || line[i] == '#') continue;
            return true;
        }
        return false;
    };
    auto fail = [&](const std::string& msg) -> InputError {
        return InputError(name + ":" + std::to_string(lineno) + ": " + msg);
    };

    if (!next_line()) throw fail("missing header line 'n m'");
    long long n = 0, m = 0;
    {
        std::istringstream hs(line);
        if (!(hs >> n >> m) || n < 1 || m < 0) throw fail("header must be 'n m' with n >= 1");
        std::string rest;
        if (hs >> rest) throw fail("trailing tokens after header");
    }
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(m));
    for (long long k = 0; k < m; ++k) {
        if (!next_line()) throw fail("expected " + std::to_string(m) + " edges, got " +
                                     std::to_string(k));
        std::istringstream es(line);
        long long u = 0, v = 0;
        if (!(es >> u >> v)) throw fail("edge line must be 'u v'");
        std::string rest;
        if (es >> rest) throw fail("trailing tokens after edge");
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw fail("edge endpoint out of range [0," + std::to_string(n - 1) + "]");
        if (u == v) throw fail("self-loop at vertex " + std::to_string(u));
        edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
    }
    return Graph::build(static_cast<int>(n), edges);
}

Graph load_graph(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open graph file '" + path + "'");
    return parse_graph(f, path);
}

void write_graph(std::ostream& os, const Graph& g) {
    os << g.n() << ' ' << g.edge_count() << '\n';
    for (auto [u, v] : g.edges()) os << u << ' ' << v << '\n';
}

ModelSpec parse_model_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("model: JSON root must be an object");
    if (!j.contains("kind") || !j.at("kind").is_string())
        throw InputError("model: missing string field 'kind'");
    ModelSpec spec;
    spec.kind = model_kind_from_string(j.at("kind").get<std::string>());
    const bool ising =
        spec.kind == ModelKind::IsingGlauber || spec.kind == ModelKind::IsingMetropolis;

    if (j.contains("q")) {
        if (!j.at("q").is_number_integer()) throw InputError("model: 'q' must be an integer");
        spec.q = j.at("q").get<int>();
    } else if (ising) {
        spec.q = 2;
    } else {
        throw InputError("model: 'q' is required for " + to_string(spec.kind));
    }

    if (spec.kind == ModelKind::ColoringGlauber) {
        if (j.contains("beta") && j.at("beta").get<double>() != 0.0)
            throw InputError("model: coloring takes no 'beta'");
        spec.beta = 0.0;
    } else {
        if (!j.contains("beta") || !j.at("beta").is_number())
            throw InputError("model: numeric field 'beta' is required for " +
                             to_string(spec.kind));
        spec.beta = j.at("beta").get<double>();
    }

    if (j.contains("lambda")) {
        if (!ising) throw InputError("model: 'lambda' is only meaningful for Ising");
        const auto& jl = j.at("lambda");
        if (jl.is_number()) {
            spec.lambda = {jl.get<double>()};  // scalar; broadcast at bind time
        } else if (jl.is_array()) {
            spec.lambda = jl.get<std::vector<double>>();
        } else {
            throw InputError("model: 'lambda' must be a number or an array");
        }
    }
    for (const auto& [key, val] : j.items()) {
        (void)val;
        if (key != "kind" && key != "q" && key != "beta" && key != "lambda")
            throw InputError("model: unknown field '" + key + "'");
    }
    return spec;
}

ModelSpec load_model(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open model file '" + path + "'");
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("model file '" + path + "': " + e.what());
    }
    return parse_model_json(j);
}

ModelSpec bind_model(ModelSpec spec, const Graph& g) {
    if (spec.lambda.size() == 1)
        spec.lambda.assign(static_cast<std::size_t>(g.n()), spec.lambda[0]);
    spec.validate(g);
    return spec;
}

nlohmann::json model_to_json(const ModelSpec& spec) {
    nlohmann::json j;
    j["kind"] = to_string(spec.kind);
    j["q"] = spec.q;
    if (spec.kind != ModelKind::ColoringGlauber) j["beta"] = spec.beta;
    if (!spec.lambda.empty()) j["lambda"] = spec.lambda;
    return j;
}

nlohmann::json telemetry_to_json(const SimulationResult& r) {
    return nlohmann::json{{"iterations_per_chunk", r.iterations_per_chunk},
                          {"changed_per_iteration", r.changed_per_iteration},
                          {"total_updates", r.total_updates},
                          {"max_depth_observed", r.max_depth_observed},
                          {"wall_ms", r.wall_ms}};
}

nlohmann::json trace_to_json(const NetworkTrace& t) {
    return nlohmann::json{{"phase1_rounds", t.phase1_rounds},
                          {"phase2_rounds", t.phase2_rounds},
                          {"rounds", t.rounds()},
                          {"total_messages", t.total_messages},
                          {"total_bits", t.total_bits},
                          {"max_message_bits", t.max_message_bits},
                          {"max_phase2_message_bits", t.max_phase2_message_bits},
                          {"tie_detected", t.tie_detected},
                          {"fixpoint_reached", t.fixpoint_reached},
                          {"fixpoint_round", t.fixpoint_round},
                          {"success", t.success}};
}

void write_message_log_csv(std::ostream& os, const std::vector<Message>& log) {
    os << "phase,round,sender,receiver,bits\n";
    for (const Message& m : log)
        os << m.phase << ',' << m.round << ',' << m.sender << ',' << m.receiver << ','
           << m.bit_size << '\n';
}

}  // namespace spinsim
