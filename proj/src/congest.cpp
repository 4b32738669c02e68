#include "spinsim/congest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include <omp.h>

#include "spinsim/coupling.hpp"
#include "spinsim/errors.hpp"
#include "spinsim/schedule.hpp"

namespace spinsim {

namespace {

int spin_bits(int q) {
    int b = 0;
    while ((1 << b) < q) ++b;
    return b;  // ceil(log2 q); 1 bit even for q=2
}

int count_bits(std::int64_t m) {
    int b = 0;
    while ((std::int64_t{1} << b) < m + 1) ++b;
    return b;  // ceil(log2(m+1)); 0 when m = 0
}

struct Node {
    int site = 0;
    std::vector<double> times;                 // own full-precision clock
    std::vector<std::uint64_t> keys;           // own truncated keys
    std::vector<std::vector<std::int32_t>> pred;  // rows per update, slot-parallel to N_v^+
    std::vector<ConsistSampler> samplers;
    std::vector<std::int32_t> cur, prev;       // X-hat slices
    std::vector<int> prev_round_tag;           // audit: round that wrote prev[i]
    int phase = 1;
};

}  // namespace

std::uint64_t truncate_time(double t, double horizon, int b) {
    if (b >= 64) return std::bit_cast<std::uint64_t>(t);
    const long double frac = static_cast<long double>(t) / static_cast<long double>(horizon);
    const long double scaled = frac * std::exp2(static_cast<long double>(b));
    auto key = static_cast<std::uint64_t>(std::floor(scaled));
    const std::uint64_t cap = (std::uint64_t{1} << b) - 1;
    return key > cap ? cap : key;
}

std::int64_t phase1_message_bits(std::int64_t count, int time_bits) {
    return count * time_bits;
}

std::int64_t phase2_message_bits(std::int64_t count, int q) {
    return count * spin_bits(q) + count_bits(count);
}

int default_phase2_rounds(int n, double T, double influence_norm_inf) {
    if (n < 1 || !(T >= 0.0) || influence_norm_inf < 0.0)
        throw InputError("default_phase2_rounds: bad arguments");
    const double v = (2.0 * std::numbers::e * 2.0 * influence_norm_inf + 1.0) * T +
                     std::log2(static_cast<double>(n) * 1e4) + 1.0;
    return static_cast<int>(std::ceil(v));
}

CongestResult run_congest(const SpinConfig& x0, double T, const Graph& g,
                          const LocalRule& rule, const CongestConfig& cfg) {
    const int n = g.n();
    const int q = rule.spin_count();
    validate_config(x0, n, q);
    if (!(T >= 0.0) || !std::isfinite(T)) throw InputError("run_congest: bad horizon");
    if (cfg.time_bits < 16 || cfg.time_bits > 64)
        throw InputError("run_congest: time_bits must lie in [16,64]");
    const int L = cfg.phase2_rounds;
    if (L < 1)
        throw InputError("run_congest: phase2_rounds must be >= 1 "
                         "(see default_phase2_rounds)");
    const int workers = cfg.worker_count > 0 ? cfg.worker_count : omp_get_max_threads();
    const int sbits = spin_bits(q);
    const int budget =
        cfg.phase1_budget_bits > 0
            ? cfg.phase1_budget_bits
            : std::max(64, 16 * static_cast<int>(std::ceil(std::log2(n + 1.0))) * sbits);

    CongestResult res;
    NetworkTrace& tr = res.trace;

    // ---- Phase I: local clocks, truncated-time exchange, predecessor rows.
    // Clock generation is the same per-site counter stream the engine uses,
    // so a node needs nothing but the shared master seed for its own times.
    const UpdateSchedule sched = generate_schedule(n, T, cfg.master_seed);
    std::vector<Node> nodes(static_cast<std::size_t>(n));
    const int width = std::max(1, static_cast<int>(std::ceil(
                                      q * std::log(static_cast<double>(std::max(n, 2))))));
    for (int v = 0; v < n; ++v) {
        Node& nd = nodes[static_cast<std::size_t>(v)];
        nd.site = v;
        nd.times = sched.times[static_cast<std::size_t>(v)];
        nd.keys.resize(nd.times.size());
        for (std::size_t i = 0; i < nd.times.size(); ++i)
            nd.keys[i] = truncate_time(nd.times[i], T, cfg.time_bits);
        const auto m = static_cast<std::int64_t>(nd.times.size());
        nd.cur.assign(static_cast<std::size_t>(m), static_cast<std::int32_t>(x0[static_cast<std::size_t>(v)]));
        nd.prev = nd.cur;
        if (cfg.audit_reads) nd.prev_round_tag.assign(static_cast<std::size_t>(m), 0);
        nd.samplers.reserve(static_cast<std::size_t>(m));
        for (std::int64_t i = 1; i <= m; ++i)
            nd.samplers.emplace_back(SeedStream{cfg.master_seed, UpdateId{v, static_cast<int>(i)}, q},
                                     width);
    }

    // Tie scan: any adjacent pair of updates whose keys collide makes the
    // exchanged orderings untrustworthy; the simulator (which has the full
    // times) flags the run rather than guessing.
    for (auto [u, v] : g.edges()) {
        const auto& ku = nodes[static_cast<std::size_t>(u)].keys;
        const auto& kv = nodes[static_cast<std::size_t>(v)].keys;
        for (std::size_t i = 0; i < ku.size() && !tr.tie_detected; ++i)
            for (std::size_t j = 0; j < kv.size(); ++j)
                if (ku[i] == kv[j]) {
                    tr.tie_detected = true;
                    break;
                }
    }

    // Predecessor rows from exchanged keys; the self slot needs no messages.
    for (int v = 0; v < n; ++v) {
        Node& nd = nodes[static_cast<std::size_t>(v)];
        const auto inc = g.inclusive_neighborhood(v);
        const auto m = nd.times.size();
        nd.pred.assign(m, std::vector<std::int32_t>(inc.size(), 0));
        for (std::size_t s = 0; s < inc.size(); ++s) {
            const int u = inc[s];
            if (u == v) {
                for (std::size_t i = 0; i < m; ++i)
                    nd.pred[i][s] = static_cast<std::int32_t>(i);
                continue;
            }
            const auto& ku = nodes[static_cast<std::size_t>(u)].keys;
            std::size_t j = 0;
            for (std::size_t i = 0; i < m; ++i) {
                while (j < ku.size() &&
                       (ku[j] < nd.keys[i] || (ku[j] == nd.keys[i] && u < v)))
                    ++j;
                nd.pred[i][s] = static_cast<std::int32_t>(j);
            }
        }
    }

    // Phase I accounting: direction v->u streams M_v keys at b bits each in
    // ceil(payload/budget) rounds; the first message also carries the sender's
    // initial spin (its local input) at ceil(log2 q) bits.
    tr.phase1_rounds = g.edge_count() > 0 ? 1 : 0;
    for (auto [e_u, e_v] : g.edges()) {
        for (auto [from, to] : {std::pair{e_u, e_v}, std::pair{e_v, e_u}}) {
            const std::int64_t payload =
                phase1_message_bits(static_cast<std::int64_t>(nodes[static_cast<std::size_t>(from)].times.size()),
                                    cfg.time_bits);
            const int rounds = std::max(1, static_cast<int>((payload + budget - 1) / budget));
            tr.phase1_rounds = std::max(tr.phase1_rounds, rounds);
            for (int r = 0; r < rounds; ++r) {
                std::int64_t bits = std::min<std::int64_t>(budget, payload - static_cast<std::int64_t>(r) * budget);
                if (bits < 0) bits = 0;
                if (r == 0) bits += sbits;  // initial spin rides along
                ++tr.total_messages;
                tr.total_bits += bits;
                tr.max_message_bits = std::max(tr.max_message_bits, bits);
                if (cfg.log_messages)
                    res.message_log.push_back({from, to, r + 1, 1, bits});
            }
        }
    }

    // ---- Phase II: L synchronous sweeps against previous-round slices.
    tr.phase2_rounds = L;
    auto account_round = [&](int round) {
        for (auto [e_u, e_v] : g.edges()) {
            for (auto [from, to] : {std::pair{e_u, e_v}, std::pair{e_v, e_u}}) {
                const std::int64_t bits = phase2_message_bits(
                    static_cast<std::int64_t>(nodes[static_cast<std::size_t>(from)].times.size()), q);
                ++tr.total_messages;
                tr.total_bits += bits;
                tr.max_message_bits = std::max(tr.max_message_bits, bits);
                tr.max_phase2_message_bits = std::max(tr.max_phase2_message_bits, bits);
                if (cfg.log_messages)
                    res.message_log.push_back({from, to, round, 2, bits});
            }
        }
    };

    for (Node& nd : nodes) nd.phase = 2;
    int sweeps_done = 0;
    for (int round = 1; round <= L; ++round) {
        account_round(round);
        if (tr.fixpoint_reached) continue;  // slices provably static; messages repeat verbatim

        std::int64_t changed = 0;
        struct Fail {
            std::int64_t key = -1;
            std::exception_ptr err;
        } fail;
#pragma omp parallel num_threads(workers) reduction(+ : changed)
        {
            std::vector<int> tau(static_cast<std::size_t>(g.max_degree()) + 1);
            std::vector<double> pbuf(static_cast<std::size_t>(q));
#pragma omp for schedule(static)
            for (int v = 0; v < n; ++v) {
                Node& nd = nodes[static_cast<std::size_t>(v)];
                const auto inc = g.inclusive_neighborhood(v);
                try {
                    for (std::size_t i = 0; i < nd.times.size(); ++i) {
                        for (std::size_t s = 0; s < inc.size(); ++s) {
                            const int u = inc[s];
                            const std::int32_t j = nd.pred[i][s];
                            if (j == 0) {
                                tau[s] = x0[static_cast<std::size_t>(u)];
                            } else {
                                const Node& src = nodes[static_cast<std::size_t>(u)];
                                if (cfg.audit_reads) {
                                    if (u != v && !g.adjacent(u, v))
                                        throw DiagnosticError("congest audit: non-local read");
                                    if (src.prev_round_tag[static_cast<std::size_t>(j - 1)] !=
                                        round - 1)
                                        throw DiagnosticError(
                                            "congest audit: value not from previous round");
                                }
                                tau[s] = src.prev[static_cast<std::size_t>(j - 1)];
                            }
                        }
                        rule.evaluate_into(v, std::span<const int>(tau.data(), inc.size()), pbuf);
                        const auto spin = static_cast<std::int32_t>(nd.samplers[i].draw(pbuf));
                        nd.cur[i] = spin;
                        if (spin != nd.prev[i]) ++changed;
                    }
                } catch (...) {
#pragma omp critical(congest_fail)
                    if (fail.key < 0 || v < fail.key) {
                        fail.key = v;
                        fail.err = std::current_exception();
                    }
                }
            }
        }
        if (fail.key >= 0) std::rethrow_exception(fail.err);
        ++sweeps_done;
        for (Node& nd : nodes) {
            nd.prev.swap(nd.cur);
            if (cfg.audit_reads)
                std::fill(nd.prev_round_tag.begin(), nd.prev_round_tag.end(), round);
        }
        if (changed == 0 && !tr.fixpoint_reached) {
            tr.fixpoint_reached = true;
            tr.fixpoint_round = round;
        }
    }
    (void)sweeps_done;
    tr.success = tr.fixpoint_reached && !tr.tie_detected;

    res.final.resize(static_cast<std::size_t>(n));
    res.values.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
        Node& nd = nodes[static_cast<std::size_t>(v)];
        res.values[static_cast<std::size_t>(v)].assign(nd.prev.begin(), nd.prev.end());
        res.final[static_cast<std::size_t>(v)] =
            nd.prev.empty() ? x0[static_cast<std::size_t>(v)]
                            : static_cast<int>(nd.prev.back());
        nd.phase = 3;
    }
    return res;
}

CongestResult run_congest_chunked(const SpinConfig& x0, double T, const Graph& g,
                                  const LocalRule& rule, const CongestConfig& cfg,
                                  double chunk_length, double influence_norm_inf) {
    if (!(T >= 0.0) || !std::isfinite(T)) throw InputError("run_congest_chunked: bad horizon");
    validate_config(x0, g.n(), rule.spin_count());
    if (cfg.phase2_rounds < 1 && influence_norm_inf < 0.0)
        throw InputError("run_congest_chunked: need explicit phase2_rounds or an influence norm");
    const double chunk =
        chunk_length > 0.0
            ? chunk_length
            : std::max(1.0, std::log(static_cast<double>(std::max(g.n(), 2))));

    CongestResult agg;
    agg.final = x0;
    agg.trace.fixpoint_reached = true;
    agg.trace.success = true;
    const double eps = 1e-12 * std::max(1.0, T);
    double elapsed = 0.0;
    for (std::uint64_t c = 0; T - elapsed > eps; ++c) {
        const double len = std::min(chunk, T - elapsed);
        CongestConfig sub = cfg;
        sub.master_seed = chunk_seed(cfg.master_seed, c);
        if (sub.phase2_rounds < 1)
            sub.phase2_rounds = default_phase2_rounds(g.n(), len, influence_norm_inf);
        CongestResult r = run_congest(agg.final, len, g, rule, sub);
        agg.final = std::move(r.final);
        agg.trace.phase1_rounds += r.trace.phase1_rounds;
        agg.trace.phase2_rounds += r.trace.phase2_rounds;
        agg.trace.total_messages += r.trace.total_messages;
        agg.trace.total_bits += r.trace.total_bits;
        agg.trace.max_message_bits = std::max(agg.trace.max_message_bits, r.trace.max_message_bits);
        agg.trace.max_phase2_message_bits =
            std::max(agg.trace.max_phase2_message_bits, r.trace.max_phase2_message_bits);
        agg.trace.tie_detected = agg.trace.tie_detected || r.trace.tie_detected;
        agg.trace.fixpoint_reached = agg.trace.fixpoint_reached && r.trace.fixpoint_reached;
        agg.trace.fixpoint_round = std::max(agg.trace.fixpoint_round, r.trace.fixpoint_round);
        agg.trace.success = agg.trace.success && r.trace.success;
        if (cfg.log_messages)
            agg.message_log.insert(agg.message_log.end(), r.message_log.begin(),
                                   r.message_log.end());
        elapsed += len;
    }
    return agg;
}

MessageStats message_stats(const NetworkTrace& trace) {
    MessageStats s;
    s.rounds = trace.rounds();
    s.total_messages = trace.total_messages;
    s.total_bits = trace.total_bits;
    s.max_message_bits = trace.max_message_bits;
    return s;
}

}  // namespace spinsim
