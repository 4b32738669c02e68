#include "spinsim/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <mutex>
#include <string>

#include <omp.h>

#include "spinsim/coupling.hpp"
#include "spinsim/errors.hpp"
#include "spinsim/stats.hpp"

namespace spinsim {

namespace {

int resolve_workers(int requested) {
    return requested > 0 ? requested : omp_get_max_threads();
}

int engine_batch_width(int q, int n, int requested) {
    if (requested > 0) return requested;
    const int w = static_cast<int>(std::ceil(q * std::log(static_cast<double>(n))));
    return std::max(1, w);
}

struct FlatSchedule {
    std::vector<std::int64_t> offset;   // per site, into the flat update arrays
    std::vector<std::int32_t> site_of;  // per flat index
    std::int64_t m = 0;
};

FlatSchedule flatten(const UpdateSchedule& sched) {
    FlatSchedule f;
    const int n = sched.n();
    f.offset.resize(static_cast<std::size_t>(n) + 1);
    f.offset[0] = 0;
    for (int v = 0; v < n; ++v)
        f.offset[static_cast<std::size_t>(v) + 1] =
            f.offset[static_cast<std::size_t>(v)] + sched.count(v);
    f.m = f.offset[static_cast<std::size_t>(n)];
    f.site_of.resize(static_cast<std::size_t>(f.m));
    for (int v = 0; v < n; ++v)
        for (std::int64_t k = f.offset[static_cast<std::size_t>(v)];
             k < f.offset[static_cast<std::size_t>(v) + 1]; ++k)
            f.site_of[static_cast<std::size_t>(k)] = v;
    return f;
}

// First-error capture for parallel sweeps: the smallest flat index wins so
// the reported failure does not depend on the worker count.
struct ErrorSlot {
    std::mutex mu;
    std::int64_t idx = -1;
    std::exception_ptr err;

    void offer(std::int64_t candidate, std::exception_ptr e) {
        std::scoped_lock lock(mu);
        if (idx < 0 || candidate < idx) {
            idx = candidate;
            err = std::move(e);
        }
    }
    void rethrow_if_set() {
        if (idx >= 0) std::rethrow_exception(err);
    }
};

Trajectory slice_trajectory(const std::vector<std::int32_t>& flat, const UpdateSchedule& sched,
                            const FlatSchedule& f) {
    Trajectory traj(static_cast<std::size_t>(sched.n()));
    for (int v = 0; v < sched.n(); ++v) {
        const auto lo = f.offset[static_cast<std::size_t>(v)];
        const auto hi = f.offset[static_cast<std::size_t>(v) + 1];
        traj[static_cast<std::size_t>(v)].assign(flat.begin() + lo, flat.begin() + hi);
    }
    return traj;
}

}  // namespace

FixpointResult simulate_fixpoint(const SpinConfig& x0, const UpdateSchedule& sched,
                                 const Graph& g, const LocalRule& rule,
                                 const EngineConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    const int n = g.n();
    const int q = rule.spin_count();
    if (sched.n() != n) throw InputError("simulate_fixpoint: schedule/graph size mismatch");
    validate_config(x0, n, q);

    const FlatSchedule flat = flatten(sched);
    const PredecessorTable pred(sched, g);
    const DepthInfo depths = update_depths(sched, g, pred);
    const int workers = resolve_workers(cfg.worker_count);
    const int width = engine_batch_width(q, n, cfg.batch_width);
    const std::int64_t max_iter = cfg.max_iterations > 0 ? cfg.max_iterations : flat.m + 2;

    // Entry (v,i) lives at offset[v]+i-1; index 0 of the dynamics is x0.
    // Both buffers start at the initial configuration.
    std::vector<std::int32_t> prev(static_cast<std::size_t>(flat.m));
    for (std::int64_t k = 0; k < flat.m; ++k)
        prev[static_cast<std::size_t>(k)] =
            static_cast<std::int32_t>(x0[static_cast<std::size_t>(flat.site_of[static_cast<std::size_t>(k)])]);
    std::vector<std::int32_t> cur(prev);

    // One memoized proposal stream per update.  Construction allocates no
    // pairs; batches materialize at the first draw.
    std::vector<ConsistSampler> samplers;
    samplers.reserve(static_cast<std::size_t>(flat.m));
    for (std::int64_t k = 0; k < flat.m; ++k) {
        const int v = flat.site_of[static_cast<std::size_t>(k)];
        const int i = static_cast<int>(k - flat.offset[static_cast<std::size_t>(v)]) + 1;
        samplers.emplace_back(SeedStream{cfg.master_seed, UpdateId{v, i}, q}, width);
    }

    FixpointTelemetry tel;
    tel.total_updates = flat.m;
    tel.max_depth = depths.max_depth;

    const int max_inc = g.max_degree() + 1;
    bool converged = false;
    for (std::int64_t iter = 1; iter <= max_iter; ++iter) {
        std::int64_t changed = 0;
        ErrorSlot error;
#pragma omp parallel num_threads(workers) reduction(+ : changed)
        {
            std::vector<int> tau(static_cast<std::size_t>(max_inc));
            std::vector<double> pbuf(static_cast<std::size_t>(q));
#pragma omp for schedule(static)
            for (std::int64_t k = 0; k < flat.m; ++k) {
                try {
                    const int v = flat.site_of[static_cast<std::size_t>(k)];
                    const int i = static_cast<int>(k - flat.offset[static_cast<std::size_t>(v)]) + 1;
                    const auto inc = g.inclusive_neighborhood(v);
                    for (int s = 0; s < static_cast<int>(inc.size()); ++s) {
                        const int u = inc[static_cast<std::size_t>(s)];
                        const std::int32_t j = pred.pred(v, i, s);
                        tau[static_cast<std::size_t>(s)] =
                            j == 0 ? x0[static_cast<std::size_t>(u)]
                                   : prev[static_cast<std::size_t>(
                                         flat.offset[static_cast<std::size_t>(u)] + j - 1)];
                    }
                    rule.evaluate_into(v, std::span<const int>(tau.data(), inc.size()), pbuf);
                    const auto spin = static_cast<std::int32_t>(
                        samplers[static_cast<std::size_t>(k)].draw(pbuf));
                    cur[static_cast<std::size_t>(k)] = spin;
                    if (spin != prev[static_cast<std::size_t>(k)]) ++changed;
                } catch (...) {
                    error.offer(k, std::current_exception());
                }
            }
        }
        error.rethrow_if_set();
        tel.changed_per_iteration.push_back(changed);
        prev.swap(cur);
        if (changed == 0) {
            tel.iterations = static_cast<int>(iter);
            converged = true;
            break;
        }
    }
    if (!converged)
        throw DiagnosticError("simulate_fixpoint: no fixpoint within " +
                              std::to_string(max_iter) +
                              " sweeps; the " + std::to_string(flat.m) +
                              "+1 sweep bound is violated");

    FixpointResult res;
    res.values = slice_trajectory(prev, sched, flat);
    res.final.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
        const auto cnt = sched.count(v);
        res.final[static_cast<std::size_t>(v)] =
            cnt == 0 ? x0[static_cast<std::size_t>(v)]
                     : res.values[static_cast<std::size_t>(v)][static_cast<std::size_t>(cnt) - 1];
    }
    res.telemetry = std::move(tel);
    res.telemetry.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
            .count();
    return res;
}

SequentialResult simulate_sequential(const SpinConfig& x0, const UpdateSchedule& sched,
                                     const Graph& g, const LocalRule& rule,
                                     std::uint64_t master_seed) {
    const int n = g.n();
    const int q = rule.spin_count();
    if (sched.n() != n) throw InputError("simulate_sequential: schedule/graph size mismatch");
    validate_config(x0, n, q);

    struct Item {
        double t;
        int site;
        int index;
    };
    std::vector<Item> order;
    order.reserve(static_cast<std::size_t>(sched.total_updates()));
    for (int v = 0; v < n; ++v) {
        const auto& tv = sched.times[static_cast<std::size_t>(v)];
        for (std::size_t i = 0; i < tv.size(); ++i)
            order.push_back({tv[i], v, static_cast<int>(i + 1)});
    }
    std::sort(order.begin(), order.end(), [](const Item& a, const Item& b) {
        return time_site_less(a.t, a.site, b.t, b.site);
    });

    SequentialResult res;
    res.final = x0;
    res.values.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v)
        res.values[static_cast<std::size_t>(v)].assign(
            sched.times[static_cast<std::size_t>(v)].size(), 0);

    std::vector<int> tau(static_cast<std::size_t>(g.max_degree()) + 1);
    std::vector<double> pbuf(static_cast<std::size_t>(q));
    for (const Item& it : order) {
        const auto inc = g.inclusive_neighborhood(it.site);
        for (int s = 0; s < static_cast<int>(inc.size()); ++s)
            tau[static_cast<std::size_t>(s)] =
                res.final[static_cast<std::size_t>(inc[static_cast<std::size_t>(s)])];
        rule.evaluate_into(it.site, std::span<const int>(tau.data(), inc.size()), pbuf);
        const int spin = sample(pbuf, SeedStream{master_seed, UpdateId{it.site, it.index}, q});
        res.final[static_cast<std::size_t>(it.site)] = spin;
        res.values[static_cast<std::size_t>(it.site)][static_cast<std::size_t>(it.index) - 1] = spin;
    }
    return res;
}

SimulationResult simulate_chunked(const SpinConfig& x0, double T, const Graph& g,
                                  const LocalRule& rule, const EngineConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    if (!(T >= 0.0) || !std::isfinite(T)) throw InputError("simulate_chunked: bad horizon");
    validate_config(x0, g.n(), rule.spin_count());
    const double chunk =
        cfg.chunk_length > 0.0
            ? cfg.chunk_length
            : std::max(1.0, std::log(static_cast<double>(std::max(g.n(), 2))));

    SimulationResult out;
    out.final = x0;
    const double eps = 1e-12 * std::max(1.0, T);
    double elapsed = 0.0;
    for (std::uint64_t c = 0; T - elapsed > eps; ++c) {
        const double len = std::min(chunk, T - elapsed);
        EngineConfig sub = cfg;
        sub.master_seed = chunk_seed(cfg.master_seed, c);
        sub.chunk_length = 0.0;
        const UpdateSchedule sched = generate_schedule(g.n(), len, sub.master_seed);
        FixpointResult r = simulate_fixpoint(out.final, sched, g, rule, sub);
        out.final = std::move(r.final);
        out.iterations_per_chunk.push_back(r.telemetry.iterations);
        out.changed_per_iteration.insert(out.changed_per_iteration.end(),
                                         r.telemetry.changed_per_iteration.begin(),
                                         r.telemetry.changed_per_iteration.end());
        out.total_updates += r.telemetry.total_updates;
        out.max_depth_observed = std::max(out.max_depth_observed, r.telemetry.max_depth);
        elapsed += len;
    }
    out.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
            .count();
    return out;
}

IterationSummary iteration_statistics(std::span<const int> iteration_counts) {
    if (iteration_counts.empty()) throw InputError("iteration_statistics: empty batch");
    std::vector<double> xs(iteration_counts.begin(), iteration_counts.end());
    IterationSummary s;
    s.mean = mean(xs);
    s.p95 = percentile(xs, 95.0);
    s.max = static_cast<int>(*std::max_element(xs.begin(), xs.end()));
    return s;
}

EnvelopeFit fit_iteration_envelope(std::span<const EnvelopePoint> points) {
    if (points.size() < 3) throw InputError("fit_iteration_envelope: need >= 3 points");
    // Normal equations for [T, log2 n, 1] with a tiny ridge: T and log2 n are
    // often collinear by experiment design, the ridge picks the minimum-norm
    // solution without changing the fitted values materially.
    double A[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double b[3] = {0, 0, 0};
    for (const auto& pt : points) {
        const double row[3] = {pt.T, std::log2(static_cast<double>(pt.n)), 1.0};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) A[i][j] += row[i] * row[j];
            b[i] += row[i] * pt.p95;
        }
    }
    for (int i = 0; i < 3; ++i) A[i][i] += 1e-9;
    // Gaussian elimination with partial pivoting.
    int piv[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int best = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(A[piv[r]][col]) > std::abs(A[piv[best]][col])) best = r;
        std::swap(piv[col], piv[best]);
        const double diag = A[piv[col]][col];
        for (int r = col + 1; r < 3; ++r) {
            const double f = A[piv[r]][col] / diag;
            for (int cc = col; cc < 3; ++cc) A[piv[r]][cc] -= f * A[piv[col]][cc];
            b[piv[r]] -= f * b[piv[col]];
        }
    }
    double x[3];
    for (int col = 2; col >= 0; --col) {
        double s = b[piv[col]];
        for (int cc = col + 1; cc < 3; ++cc) s -= A[piv[col]][cc] * x[cc];
        x[col] = s / A[piv[col]][col];
    }
    EnvelopeFit fit;
    fit.c_T = x[0];
    fit.c_log2n = x[1];
    fit.c_const = x[2];
    for (const auto& pt : points) {
        const double pred = fit.c_T * pt.T + fit.c_log2n * std::log2(static_cast<double>(pt.n)) +
                            fit.c_const;
        if (pt.p95 > 0.0)
            fit.max_rel_residual =
                std::max(fit.max_rel_residual, std::abs(pred - pt.p95) / pt.p95);
    }
    return fit;
}

}  // namespace spinsim
