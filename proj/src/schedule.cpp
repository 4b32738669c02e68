#include "spinsim/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "spinsim/errors.hpp"

namespace spinsim {

std::int64_t UpdateSchedule::total_updates() const {
    std::int64_t m = 0;
    for (const auto& ts : times) m += static_cast<std::int64_t>(ts.size());
    return m;
}

void UpdateSchedule::validate() const {
    if (!(horizon >= 0.0)) throw InputError("schedule: horizon must be non-negative");
    for (std::size_t v = 0; v < times.size(); ++v) {
        double prev = 0.0;
        for (double t : times[v]) {
            if (!(t > 0.0) || t >= horizon || t <= prev)
                throw InputError("schedule: times of site " + std::to_string(v) +
                                 " are not strictly increasing inside (0, horizon)");
            prev = t;
        }
    }
}

UpdateSchedule generate_schedule(int n, double T, std::uint64_t seed) {
    if (n < 1) throw InputError("generate_schedule: n must be >= 1");
    if (!(T >= 0.0) || !std::isfinite(T)) throw InputError("generate_schedule: bad horizon");
    UpdateSchedule s;
    s.horizon = T;
    s.times.assign(static_cast<std::size_t>(n), {});
    for (int v = 0; v < n; ++v) {
        auto& ts = s.times[static_cast<std::size_t>(v)];
        double t = 0.0;
        for (std::uint64_t j = 1;; ++j) {
            const double u = uniform_open(hash_fields(seed, static_cast<std::uint64_t>(v), j, 0,
                                                      Lane::Clock));
            t += -std::log1p(-u);  // Exp(1) inter-arrival, strictly positive
            if (t >= T) break;
            ts.push_back(t);
        }
    }
    return s;
}

PredecessorTable::PredecessorTable(const UpdateSchedule& sched, const Graph& g) {
    if (sched.n() != g.n())
        throw InputError("predecessor_table: schedule covers " + std::to_string(sched.n()) +
                         " sites, graph has " + std::to_string(g.n()));
    const int n = g.n();
    rows_.resize(static_cast<std::size_t>(n));
    width_.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
        const auto inc = g.inclusive_neighborhood(v);
        const auto& tv = sched.times[static_cast<std::size_t>(v)];
        const int w = static_cast<int>(inc.size());
        width_[static_cast<std::size_t>(v)] = w;
        auto& rows = rows_[static_cast<std::size_t>(v)];
        rows.assign(tv.size() * static_cast<std::size_t>(w), 0);
        for (int s = 0; s < w; ++s) {
            const int u = inc[static_cast<std::size_t>(s)];
            if (u == v) {
                for (std::size_t i = 0; i < tv.size(); ++i)
                    rows[i * static_cast<std::size_t>(w) + static_cast<std::size_t>(s)] =
                        static_cast<std::int32_t>(i);  // pred of (v,i+1) at v is i
                continue;
            }
            // Merge: advance j over u's clock while it stays before (t_i^v, v).
            const auto& tu = sched.times[static_cast<std::size_t>(u)];
            std::size_t j = 0;
            for (std::size_t i = 0; i < tv.size(); ++i) {
                while (j < tu.size() && time_site_less(tu[j], u, tv[i], v)) ++j;
                rows[i * static_cast<std::size_t>(w) + static_cast<std::size_t>(s)] =
                    static_cast<std::int32_t>(j);
            }
        }
    }
}

DepthInfo update_depths(const UpdateSchedule& sched, const Graph& g,
                        const PredecessorTable& pred) {
    const int n = g.n();
    DepthInfo info;
    info.depth.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v)
        info.depth[static_cast<std::size_t>(v)].assign(
            sched.times[static_cast<std::size_t>(v)].size(), 0);

    // Global (time, site) order; every predecessor of an update precedes it,
    // so one forward pass settles all depths.
    struct Item {
        double t;
        int site;
        std::int32_t index;  // 1-based
    };
    std::vector<Item> order;
    order.reserve(static_cast<std::size_t>(sched.total_updates()));
    for (int v = 0; v < n; ++v) {
        const auto& tv = sched.times[static_cast<std::size_t>(v)];
        for (std::size_t i = 0; i < tv.size(); ++i)
            order.push_back({tv[i], v, static_cast<std::int32_t>(i + 1)});
    }
    std::sort(order.begin(), order.end(), [](const Item& a, const Item& b) {
        return time_site_less(a.t, a.site, b.t, b.site);
    });

    for (const Item& it : order) {
        const auto inc = g.inclusive_neighborhood(it.site);
        std::int32_t best = 0;
        for (int s = 0; s < static_cast<int>(inc.size()); ++s) {
            const std::int32_t j = pred.pred(it.site, it.index, s);
            if (j >= 1) {
                const int u = inc[static_cast<std::size_t>(s)];
                best = std::max(best,
                                info.depth[static_cast<std::size_t>(u)][static_cast<std::size_t>(j - 1)]);
            }
        }
        info.depth[static_cast<std::size_t>(it.site)][static_cast<std::size_t>(it.index - 1)] =
            best + 1;
        info.max_depth = std::max(info.max_depth, static_cast<int>(best + 1));
    }
    return info;
}

double depth_tail_bound(int n, int max_degree, double T, int l) {
    if (n < 1 || max_degree < 0 || !(T >= 0.0) || l < 1)
        throw InputError("depth_tail_bound: bad arguments");
    if (T == 0.0) return 0.0;
    // log of n * (e*(Delta+1)*T / l)^l, clamped to [0,1] after exponentiation.
    const double logv = std::log(static_cast<double>(n)) +
                        static_cast<double>(l) *
                            (1.0 + std::log(static_cast<double>(max_degree + 1) * T) -
                             std::log(static_cast<double>(l)));
    if (logv >= 0.0) return 1.0;
    return std::exp(logv);
}

void write_schedule(std::ostream& os, const UpdateSchedule& sched) {
    auto put_u64 = [&os](std::uint64_t v) {
        unsigned char buf[8];
        for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
        os.write(reinterpret_cast<const char*>(buf), 8);
    };
    put_u64(static_cast<std::uint64_t>(sched.n()));
    for (const auto& ts : sched.times) put_u64(ts.size());
    for (const auto& ts : sched.times)
        for (double t : ts) {
            std::uint64_t bits;
            std::memcpy(&bits, &t, 8);
            put_u64(bits);
        }
    if (!os) throw InputError("write_schedule: stream failure");
}

UpdateSchedule read_schedule(std::istream& is, double horizon) {
    auto get_u64 = [&is]() {
        unsigned char buf[8];
        is.read(reinterpret_cast<char*>(buf), 8);
        if (!is) throw InputError("read_schedule: truncated dump");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
        return v;
    };
    const std::uint64_t n = get_u64();
    if (n == 0 || n > (1ULL << 31)) throw InputError("read_schedule: implausible site count");
    UpdateSchedule s;
    s.times.resize(n);
    std::vector<std::uint64_t> counts(n);
    for (std::uint64_t v = 0; v < n; ++v) counts[v] = get_u64();
    double tmax = 0.0;
    for (std::uint64_t v = 0; v < n; ++v) {
        auto& ts = s.times[v];
        ts.resize(counts[v]);
        for (auto& t : ts) {
            const std::uint64_t bits = get_u64();
            std::memcpy(&t, &bits, 8);
            tmax = std::max(tmax, t);
        }
    }
    // The dump format carries no horizon; callers replaying a schedule supply
    // it, otherwise the tightest consistent value is used.
    s.horizon = horizon >= 0.0 ? horizon : std::nextafter(tmax, std::numeric_limits<double>::max());
    return s;
}

}  // namespace spinsim
