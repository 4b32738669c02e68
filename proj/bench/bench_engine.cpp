// Benchmark: serial reference replay vs the OpenMP fixpoint engine at several
// worker counts, on the same instances.  Outputs are cross-checked entry for
// entry before any timing is reported, so a speedup never hides a divergence.
//
// Usage: bench_engine [n] [T] [reps]   (defaults 2000, 6.0, 5)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "spinsim/engine.hpp"
#include "spinsim/graph_gen.hpp"
#include "spinsim/model.hpp"
#include "spinsim/schedule.hpp"

using namespace spinsim;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        if (ms < best) best = ms;
    }
    return best;
}

struct Instance {
    std::string name;
    Graph g;
    ModelSpec spec;
};

}  // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 2000;
    const double T = argc > 2 ? std::atof(argv[2]) : 6.0;
    const int reps = argc > 3 ? std::atoi(argv[3]) : 5;
    const std::uint64_t master = 0xBE7C;

    std::vector<Instance> instances;
    instances.push_back(
        {"ising  b=1.2 4-reg", random_near_regular_graph(n, 4, 1), ModelSpec::ising_glauber(1.2)});
    instances.push_back({"potts  q=4 b=1.5 4-reg", random_near_regular_graph(n, 4, 2),
                         ModelSpec::potts_glauber(4, 1.5)});

    std::printf("n=%d T=%.2f reps=%d (best-of timing)\n", n, T, reps);
    std::printf("%-24s %12s %12s %8s %8s\n", "instance", "variant", "best ms", "speedup",
                "iters");
    for (const Instance& inst : instances) {
        auto rule = make_rule(inst.spec, inst.g);
        const UpdateSchedule sched = generate_schedule(inst.g.n(), T, master);
        const SpinConfig x0(static_cast<std::size_t>(inst.g.n()), 0);

        const SequentialResult ref = simulate_sequential(x0, sched, inst.g, *rule, master);
        const double seq_ms =
            time_ms([&] { simulate_sequential(x0, sched, inst.g, *rule, master); }, reps);
        std::printf("%-24s %12s %12.2f %8s %8s\n", inst.name.c_str(), "sequential", seq_ms, "-",
                    "-");

        double base_ms = 0.0;
        for (int workers : {1, 2, 4, 8}) {
            EngineConfig cfg;
            cfg.master_seed = master;
            cfg.worker_count = workers;
            const FixpointResult out = simulate_fixpoint(x0, sched, inst.g, *rule, cfg);
            if (out.final != ref.final || out.values != ref.values) {
                std::fprintf(stderr, "MISMATCH against the sequential reference (workers=%d)\n",
                             workers);
                return 1;
            }
            const double ms =
                time_ms([&] { simulate_fixpoint(x0, sched, inst.g, *rule, cfg); }, reps);
            if (workers == 1) base_ms = ms;
            char label[32], speed[32];
            std::snprintf(label, sizeof label, "fixpoint w=%d", workers);
            std::snprintf(speed, sizeof speed, "%.2fx", base_ms / ms);
            std::printf("%-24s %12s %12.2f %8s %8d\n", "", label, ms, speed,
                        out.telemetry.iterations);
        }
    }
    std::puts("all fixpoint outputs matched the sequential reference");
    return 0;
}
