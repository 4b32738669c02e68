#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "spinsim/graph.hpp"
#include "spinsim/rng.hpp"

namespace spinsim {

// Realization of the per-site rate-1 Poisson clocks on [0, horizon): one
// strictly increasing time list per site.  Cross-site comparisons everywhere
// use the lexicographic order (time, site), which makes the global update
// order total and deterministic.
struct UpdateSchedule {
    double horizon = 0.0;
    std::vector<std::vector<double>> times;

    int n() const { return static_cast<int>(times.size()); }
    int count(int v) const { return static_cast<int>(times[static_cast<std::size_t>(v)].size()); }
    double time_of(UpdateId u) const {
        return times[static_cast<std::size_t>(u.site)][static_cast<std::size_t>(u.index - 1)];
    }
    std::int64_t total_updates() const;

    void validate() const;
};

// Inverse-CDF exponential inter-arrivals from the counter-based clock lane;
// per-site independent, so generation order (or parallelism) cannot change
// the result.  Schedules for nested horizons under one seed are prefixes.
UpdateSchedule generate_schedule(int n, double T, std::uint64_t seed);

// (time, site) comparison helper; breaks exact time ties by site id.
inline bool time_site_less(double ta, int sa, double tb, int sb) {
    return ta < tb || (ta == tb && sa < sb);
}

// For update (v,i) and every u in N_v^+, the index of the last update of u
// strictly before (v,i); 0 means "initial configuration".  The u=v slot is
// always i-1.  Rows are indexed parallel to graph.inclusive_neighborhood(v).
class PredecessorTable {
public:
    PredecessorTable(const UpdateSchedule& sched, const Graph& g);

    // slot s of update (v,i) in row-major per-site storage.
    std::int32_t pred(int v, int i, int slot) const {
        const auto& rows = rows_[static_cast<std::size_t>(v)];
        return rows[static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(width_[static_cast<std::size_t>(v)]) +
                    static_cast<std::size_t>(slot)];
    }
    int width(int v) const { return width_[static_cast<std::size_t>(v)]; }

private:
    std::vector<std::vector<std::int32_t>> rows_;
    std::vector<int> width_;
};

// Depth of every update under the happens-before order generated by
// (u,j) -> (v,i) for u in N_v^+ with t_j^u before t_i^v: one pass in global
// time order, depth = 1 + max over predecessor slots.
struct DepthInfo {
    std::vector<std::vector<std::int32_t>> depth;  // aligned with schedule.times
    int max_depth = 0;
};

DepthInfo update_depths(const UpdateSchedule& sched, const Graph& g,
                        const PredecessorTable& pred);

// Tail bound P(max depth >= l) <= n * (e*(Delta+1)*T / l)^l, clamped to [0,1];
// evaluated in log space.
double depth_tail_bound(int n, int max_degree, double T, int l);

// Binary dump: u64 site count, u64 per-site counts, then each site's times as
// raw 64-bit doubles.  The horizon is not part of the format; the loader
// takes it explicitly (defaulting to the largest recorded time).
void write_schedule(std::ostream& os, const UpdateSchedule& sched);
UpdateSchedule read_schedule(std::istream& is, double horizon = -1.0);

}  // namespace spinsim
