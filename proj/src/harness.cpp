#include "spinsim/harness.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "spinsim/coupling.hpp"
#include "spinsim/errors.hpp"
#include "spinsim/exact.hpp"
#include "spinsim/graph_gen.hpp"
#include "spinsim/influence.hpp"
#include "spinsim/io.hpp"
#include "spinsim/stats.hpp"
#include "spinsim/version.hpp"

namespace spinsim {

namespace {

using nlohmann::json;

std::uint64_t subrun_seed(std::uint64_t seed, std::uint64_t idx) {
    return hash_fields(seed, 0x5eedULL, idx, 0, Lane::Chunk);
}

struct Loaded {
    Graph graph;
    ModelSpec spec;
    std::unique_ptr<LocalRule> rule;
};

Loaded load_instance(const RunManifest& m, std::ostream& err) {
    if (m.graph_path.empty()) throw InputError(m.subcommand + ": --graph is required");
    if (m.model.is_null()) throw InputError(m.subcommand + ": --model is required");
    Loaded ld{load_graph(m.graph_path), {}, nullptr};
    ld.spec = bind_model(parse_model_json(m.model), ld.graph);
    if (!ld.spec.coloring_regime_ok(ld.graph))
        err << "warning: coloring with q < max_degree+2; updates may hit blocked sites\n";
    ld.rule = make_rule(ld.spec, ld.graph);
    return ld;
}

EngineConfig engine_config(const RunManifest& m) {
    EngineConfig cfg;
    cfg.master_seed = m.seed;
    cfg.worker_count = m.workers;
    cfg.chunk_length = m.chunk_len;
    return cfg;
}

// L for the congest backend: explicit flag wins, otherwise derived from the
// influence norm of the bound model.
int congest_rounds(const RunManifest& m, const Loaded& ld, std::ostream& err) {
    if (m.congest_L > 0) return m.congest_L;
    try {
        const double c = operator_norm(influence_matrix(ld.spec, ld.graph), NormP::Inf);
        const int L = default_phase2_rounds(ld.graph.n(), m.T, c);
        err << "congest: derived L=" << L << " from influence norm " << c << "\n";
        return L;
    } catch (const CapacityError& e) {
        throw InputError(std::string("cannot derive congest round count (") + e.what() +
                         "); pass --congest-L");
    }
}

CongestConfig congest_config(const RunManifest& m, int L) {
    CongestConfig cfg;
    cfg.master_seed = m.seed;
    cfg.phase2_rounds = L;
    cfg.time_bits = m.time_bits;
    cfg.worker_count = m.workers;
    cfg.log_messages = !m.congest_msg_log.empty();
    return cfg;
}

void emit(const RunManifest& m, const json& payload, std::ostream& out) {
    json doc;
    doc["manifest"] = m.to_json();
    doc["version"] = kVersion;
    for (const auto& [k, v] : payload.items()) doc[k] = v;
    if (m.output_path.empty()) {
        out << doc.dump(2) << '\n';
    } else {
        std::ofstream f(m.output_path);
        if (!f) throw InputError("cannot open output path '" + m.output_path + "'");
        f << doc.dump(2) << '\n';
    }
}

std::ostream& open_csv(const RunManifest& m, std::ofstream& file, std::ostream& out) {
    if (m.output_path.empty()) return out;
    file.open(m.output_path);
    if (!file) throw InputError("cannot open output path '" + m.output_path + "'");
    return file;
}

// Telemetry for the output document: wall-clock stripped so a fixed manifest
// reproduces byte-identical bytes; timing goes to the log stream instead.
json stable_telemetry(const SimulationResult& r, std::ostream& err) {
    json t = telemetry_to_json(r);
    err << "engine: wall_ms=" << t["wall_ms"] << "\n";
    t.erase("wall_ms");
    return t;
}

}  // namespace

json RunManifest::to_json() const {
    json j;
    j["subcommand"] = subcommand;
    j["graph"] = graph_path;
    j["model"] = model;
    j["T"] = T;
    j["seed"] = seed;
    j["backend"] = backend;
    j["output"] = output_path;
    j["runs"] = runs;
    j["workers"] = workers;
    j["chunk_len"] = chunk_len;
    j["congest_L"] = congest_L;
    j["time_bits"] = time_bits;
    if (subcommand == "norm") j["C"] = threshold_C;
    if (subcommand == "coupling-bench") {
        j["q"] = q;
        j["pairs"] = pairs;
        j["draws"] = draws;
    }
    if (subcommand == "depth-stats") {
        j["n"] = n;
        j["deg"] = deg;
        j["seeds"] = seeds;
    }
    if (!congest_msg_log.empty()) j["congest_msg_log"] = congest_msg_log;
    return j;
}

int cmd_sample(const RunManifest& m, std::ostream& out, std::ostream& err) {
    Loaded ld = load_instance(m, err);
    const SpinConfig x0(static_cast<std::size_t>(ld.graph.n()), 0);
    json payload;
    if (m.backend == "engine") {
        const SimulationResult r = simulate_chunked(x0, m.T, ld.graph, *ld.rule, engine_config(m));
        payload["final"] = r.final;
        payload["telemetry"] = stable_telemetry(r, err);
    } else if (m.backend == "congest") {
        const int L = congest_rounds(m, ld, err);
        CongestConfig cfg = congest_config(m, L);
        const CongestResult r =
            m.chunk_len > 0.0
                ? run_congest_chunked(x0, m.T, ld.graph, *ld.rule, cfg, m.chunk_len)
                : run_congest(x0, m.T, ld.graph, *ld.rule, cfg);
        payload["final"] = r.final;
        payload["trace"] = trace_to_json(r.trace);
        if (!m.congest_msg_log.empty()) {
            std::ofstream f(m.congest_msg_log);
            if (!f) throw InputError("cannot open message log path '" + m.congest_msg_log + "'");
            write_message_log_csv(f, r.message_log);
        }
        if (!r.trace.success)
            err << "warning: congest run flagged (tie=" << r.trace.tie_detected
                << ", fixpoint_reached=" << r.trace.fixpoint_reached << ")\n";
    } else {
        throw InputError("unknown backend '" + m.backend + "' (engine|congest)");
    }
    emit(m, payload, out);
    return 0;
}

int cmd_verify(const RunManifest& m, std::ostream& out, std::ostream& err) {
    Loaded ld = load_instance(m, err);
    const SpinConfig x0(static_cast<std::size_t>(ld.graph.n()), 0);
    std::int64_t mismatches = 0;
    json first_mismatch;
    int flagged = 0;

    int L = 0;
    if (m.backend == "congest") L = congest_rounds(m, ld, err);

    for (std::int64_t c = 0; c < m.runs; ++c) {
        const std::uint64_t seed = subrun_seed(m.seed, static_cast<std::uint64_t>(c));
        const UpdateSchedule sched = generate_schedule(ld.graph.n(), m.T, seed);
        const SequentialResult ref = simulate_sequential(x0, sched, ld.graph, *ld.rule, seed);

        Trajectory got;
        if (m.backend == "engine") {
            EngineConfig cfg = engine_config(m);
            cfg.master_seed = seed;
            got = simulate_fixpoint(x0, sched, ld.graph, *ld.rule, cfg).values;
        } else {
            CongestConfig cfg = congest_config(m, L);
            cfg.master_seed = seed;
            const CongestResult r = run_congest(x0, m.T, ld.graph, *ld.rule, cfg);
            if (!r.trace.success) ++flagged;
            got = r.values;
        }

        bool bad = false;
        for (int v = 0; v < ld.graph.n() && !bad; ++v) {
            const auto& a = got[static_cast<std::size_t>(v)];
            const auto& b = ref.values[static_cast<std::size_t>(v)];
            if (a.size() != b.size()) {
                bad = true;
                break;
            }
            for (std::size_t i = 0; i < a.size(); ++i)
                if (a[i] != b[i]) {
                    bad = true;
                    if (mismatches == 0)
                        first_mismatch = {{"case", c},
                                          {"site", v},
                                          {"index", i + 1},
                                          {"got", a[i]},
                                          {"want", b[i]}};
                    break;
                }
        }
        if (bad) ++mismatches;
        if ((c + 1) % 200 == 0) err << "verify: " << (c + 1) << "/" << m.runs << " cases\n";
    }

    json payload;
    payload["cases"] = m.runs;
    payload["mismatches"] = mismatches;
    payload["first_mismatch"] = mismatches > 0 ? first_mismatch : json(nullptr);
    if (m.backend == "congest") payload["flagged_traces"] = flagged;
    emit(m, payload, out);
    return mismatches > 0 ? 1 : 0;
}

int cmd_tv(const RunManifest& m, std::ostream& out, std::ostream& err) {
    Loaded ld = load_instance(m, err);
    const int n = ld.graph.n();
    const int q = ld.spec.q;
    double states = 1;
    for (int v = 0; v < n; ++v) states *= q;
    if (states > 4096)
        throw CapacityError("cmd_tv: q^n = " + std::to_string(states) +
                            " exceeds the 4096-state budget");
    const auto total = static_cast<std::int64_t>(states);

    const std::vector<double> exact = exact_gibbs_distribution(ld.spec, ld.graph);
    const SpinConfig x0(static_cast<std::size_t>(n), 0);
    int L = 0;
    if (m.backend == "congest") L = congest_rounds(m, ld, err);

    std::vector<std::int64_t> hist(static_cast<std::size_t>(total), 0);
    for (std::int64_t r = 0; r < m.runs; ++r) {
        const std::uint64_t seed = subrun_seed(m.seed, static_cast<std::uint64_t>(r));
        SpinConfig fin;
        if (m.backend == "engine") {
            EngineConfig cfg = engine_config(m);
            cfg.master_seed = seed;
            fin = simulate_chunked(x0, m.T, ld.graph, *ld.rule, cfg).final;
        } else {
            CongestConfig cfg = congest_config(m, L);
            cfg.master_seed = seed;
            fin = run_congest(x0, m.T, ld.graph, *ld.rule, cfg).final;
        }
        ++hist[static_cast<std::size_t>(config_index(fin, q))];
        if ((r + 1) % 10000 == 0) err << "tv: " << (r + 1) << "/" << m.runs << " runs\n";
    }

    double tv = 0.0;
    for (std::int64_t s = 0; s < total; ++s)
        tv += std::abs(static_cast<double>(hist[static_cast<std::size_t>(s)]) /
                           static_cast<double>(m.runs) -
                       exact[static_cast<std::size_t>(s)]);
    tv *= 0.5;

    json table = json::array();
    for (std::int64_t s = 0; s < total; ++s)
        table.push_back({{"config", config_from_index(s, n, q)},
                         {"exact", exact[static_cast<std::size_t>(s)]},
                         {"empirical", static_cast<double>(hist[static_cast<std::size_t>(s)]) /
                                           static_cast<double>(m.runs)}});
    json payload;
    payload["runs"] = m.runs;
    payload["tv"] = tv;
    payload["table"] = table;
    emit(m, payload, out);
    return 0;
}

int cmd_coupling_bench(const RunManifest& m, std::ostream& out, std::ostream& err) {
    if (m.q < 2) throw InputError("coupling-bench: q must be >= 2");
    std::ofstream file;
    std::ostream& os = open_csv(m, file, out);
    os << "kind,k,i,j,d_tv,jaccard,agreement,disagreement,bound_2dtv,ok_jaccard,ok_competitive\n";

    bool violation = false;
    auto run_pair = [&](const std::string& kind, int k, int i, int j,
                        std::span<const double> p, std::span<const double> r) {
        const double dtv = tv_distance(p, r);
        const double jac = jaccard_similarity(p, r);
        std::int64_t agree = 0;
        for (std::int64_t d = 0; d < m.draws; ++d) {
            const SeedStream s{subrun_seed(m.seed, static_cast<std::uint64_t>(d)),
                               UpdateId{i * 1000 + j, static_cast<int>(k + 1)}, m.q};
            const auto [a, b] = coupled_sample_pair(p, r, s);
            if (a == b) ++agree;
        }
        const double ag = static_cast<double>(agree) / static_cast<double>(m.draws);
        const double dis = 1.0 - ag;
        const double sig_j = std::sqrt(std::max(jac * (1.0 - jac), 1e-12) /
                                       static_cast<double>(m.draws));
        const double sig_d = std::sqrt(std::max(dis * (1.0 - dis), 1e-12) /
                                       static_cast<double>(m.draws));
        const bool ok_j = ag >= jac - 3.0 * sig_j;
        const bool ok_c = dis <= 2.0 * dtv + 3.0 * sig_d;
        violation = violation || !ok_j || !ok_c;
        os << kind << ',' << k << ',' << i << ',' << j << ',' << dtv << ',' << jac << ',' << ag
           << ',' << dis << ',' << 2.0 * dtv << ',' << (ok_j ? 1 : 0) << ',' << (ok_c ? 1 : 0)
           << '\n';
    };

    // Random pairs from the counter stream (Dirichlet(1) marginals).
    for (std::int64_t pr = 0; pr < m.pairs; ++pr) {
        std::vector<double> p(static_cast<std::size_t>(m.q)), r(static_cast<std::size_t>(m.q));
        for (int side = 0; side < 2; ++side) {
            auto& dst = side == 0 ? p : r;
            double sum = 0.0;
            for (int x = 0; x < m.q; ++x) {
                const double u = uniform_open(hash_fields(
                    m.seed, static_cast<std::uint64_t>(pr) * 2 + static_cast<std::uint64_t>(side),
                    static_cast<std::uint64_t>(x), 0x9a9aULL, Lane::PairY));
                dst[static_cast<std::size_t>(x)] = -std::log1p(-u);
                sum += dst[static_cast<std::size_t>(x)];
            }
            for (auto& v : dst) v /= sum;
        }
        run_pair("random", 0, static_cast<int>(pr), 0, p, r);
    }

    // Adversarial families for k = 1..3 (as far as the spin space allows).
    for (int k = 1; k <= 3 && k + 1 <= m.q; ++k) {
        const auto fam = adversarial_family(k, m.q);
        for (std::size_t i = 0; i < fam.size(); ++i)
            for (std::size_t j = i + 1; j < fam.size(); ++j)
                run_pair("adversarial", k, static_cast<int>(i), static_cast<int>(j),
                         fam[i].view(), fam[j].view());
    }
    err << "coupling-bench: " << (violation ? "bound violation found" : "all rows ok") << "\n";
    return violation ? 1 : 0;
}

int cmd_depth_stats(const RunManifest& m, std::ostream& out, std::ostream& err) {
    if (m.n < 1 || m.deg < 0 || m.seeds < 1) throw InputError("depth-stats: bad n/deg/seeds");
    const Graph g = random_near_regular_graph(m.n, m.deg, m.seed);
    std::vector<int> maxima;
    maxima.reserve(static_cast<std::size_t>(m.seeds));
    int grand_max = 0;
    for (std::int64_t s = 0; s < m.seeds; ++s) {
        const UpdateSchedule sched =
            generate_schedule(m.n, m.T, subrun_seed(m.seed, static_cast<std::uint64_t>(s)));
        const PredecessorTable pred(sched, g);
        const DepthInfo d = update_depths(sched, g, pred);
        maxima.push_back(d.max_depth);
        grand_max = std::max(grand_max, d.max_depth);
        if ((s + 1) % 200 == 0) err << "depth-stats: " << (s + 1) << "/" << m.seeds << "\n";
    }
    std::ofstream file;
    std::ostream& os = open_csv(m, file, out);
    os << "l,count_eq,empirical_tail,bound\n";
    const int lmax = std::max(grand_max + 1, 40);
    for (int l = 1; l <= lmax; ++l) {
        std::int64_t eq = 0, ge = 0;
        for (int v : maxima) {
            if (v == l) ++eq;
            if (v >= l) ++ge;
        }
        os << l << ',' << eq << ','
           << static_cast<double>(ge) / static_cast<double>(m.seeds) << ','
           << depth_tail_bound(m.n, g.max_degree(), m.T, l) << '\n';
    }
    return 0;
}

int cmd_norm(const RunManifest& m, std::ostream& out, std::ostream& err) {
    Loaded ld = load_instance(m, err);
    const InfluenceMatrix rho = influence_matrix(ld.spec, ld.graph);
    const double n1 = operator_norm(rho, NormP::One);
    const double n2 = operator_norm(rho, NormP::Two);
    const double ninf = operator_norm(rho, NormP::Inf);
    json payload;
    payload["norm_1"] = n1;
    payload["norm_2"] = n2;
    payload["norm_inf"] = ninf;
    payload["riesz_thorin_bound"] = std::sqrt(n1 * ninf);
    payload["dobrushin"] = n1 < 1.0;
    payload["dobrushin_shlosman"] = ninf < 1.0;
    payload["within_threshold"] = {{"p1", n1 <= m.threshold_C},
                                   {"p2", n2 <= m.threshold_C},
                                   {"pinf", ninf <= m.threshold_C}};
    emit(m, payload, out);
    return 0;
}

int run_guarded(const RunManifest& m, int (*cmd)(const RunManifest&, std::ostream&, std::ostream&),
                std::ostream& out, std::ostream& err) {
    try {
        return cmd(m, out, err);
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return 2;
    } catch (const DegenerateDistributionError& e) {
        err << "input error: " << e.what() << "\n";
        return 2;
    } catch (const CapacityError& e) {
        err << "capacity error: " << e.what() << "\n";
        return 3;
    } catch (const DiagnosticError& e) {
        err << "internal error: " << e.what() << "\n";
        return 70;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 70;
    }
}

}  // namespace spinsim
