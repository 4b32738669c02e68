#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spinsim/graph.hpp"
#include "spinsim/model.hpp"
#include "spinsim/schedule.hpp"

namespace spinsim {

struct EngineConfig {
    std::uint64_t master_seed = 0;
    int worker_count = 0;     // 0 = all available threads
    int batch_width = 0;      // 0 = ceil(q * ln n), at least 1
    std::int64_t max_iterations = 0;  // 0 = sum M_v + 2 (the +2 guard must never fire)
    double chunk_length = 0;  // 0 = ln n, at least 1; used by simulate_chunked only
};

// Value of every update, aligned with the schedule's time lists.
using Trajectory = std::vector<std::vector<int>>;

struct FixpointTelemetry {
    int iterations = 0;
    std::vector<std::int64_t> changed_per_iteration;  // last entry is 0
    std::int64_t total_updates = 0;
    int max_depth = 0;
    double wall_ms = 0.0;
};

struct FixpointResult {
    SpinConfig final;
    Trajectory values;
    FixpointTelemetry telemetry;
};

// Iterative fixpoint resolution of the dynamics: every update (v,i) is
// re-resolved each sweep against the previous sweep's values at its
// predecessors, with memoized per-update proposal streams.  Converges to the
// unique fixpoint in at most (total updates + 1) sweeps, at most
// (max depth + 1) in fact, and reproduces simulate_sequential entry for
// entry.  Sweeps are parallel over updates; the result is bit-identical for
// any worker count.
FixpointResult simulate_fixpoint(const SpinConfig& x0, const UpdateSchedule& sched,
                                 const Graph& g, const LocalRule& rule,
                                 const EngineConfig& cfg);

// Reference implementation: resolves updates one at a time in global
// (time, site) order against the evolving configuration, drawing from the
// same per-update streams.
struct SequentialResult {
    SpinConfig final;
    Trajectory values;
};

SequentialResult simulate_sequential(const SpinConfig& x0, const UpdateSchedule& sched,
                                     const Graph& g, const LocalRule& rule,
                                     std::uint64_t master_seed);

struct SimulationResult {
    SpinConfig final;
    std::vector<int> iterations_per_chunk;
    std::vector<std::int64_t> changed_per_iteration;  // concatenated across chunks
    std::int64_t total_updates = 0;
    int max_depth_observed = 0;
    double wall_ms = 0.0;
};

// Long-horizon driver: splits [0,T) into chunks of cfg.chunk_length, runs the
// fixpoint engine per chunk under sub-seed chunk_seed(master_seed, c), and
// feeds each chunk's final configuration into the next.  By the Markov
// property the output law is invariant to the chunking.
SimulationResult simulate_chunked(const SpinConfig& x0, double T, const Graph& g,
                                  const LocalRule& rule, const EngineConfig& cfg);

struct IterationSummary {
    double mean = 0.0;
    double p95 = 0.0;
    int max = 0;
};

IterationSummary iteration_statistics(std::span<const int> iteration_counts);

// Least-squares fit of p95 iteration counts against c1*T + c2*log2(n) + c3
// (tiny ridge term; T and log n may be collinear by design of the sweep).
struct EnvelopePoint {
    int n = 0;
    double T = 0.0;
    double p95 = 0.0;
};

struct EnvelopeFit {
    double c_T = 0.0;
    double c_log2n = 0.0;
    double c_const = 0.0;
    double max_rel_residual = 0.0;
};

EnvelopeFit fit_iteration_envelope(std::span<const EnvelopePoint> points);

}  // namespace spinsim
