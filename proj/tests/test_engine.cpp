#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "spinsim/coupling.hpp"
#include "spinsim/engine.hpp"
#include "spinsim/errors.hpp"
#include "spinsim/graph.hpp"
#include "spinsim/model.hpp"
#include "spinsim/rng.hpp"
#include "spinsim/schedule.hpp"
#include "test_util.hpp"

using namespace spinsim;
using namespace testutil;

namespace {

// Independent replay oracle: resolve the updates one by one in (time, site)
// order against an evolving configuration, drawing straight from the
// per-update streams.  Shares no code with the engine's replay.
Trajectory oracle_replay(const SpinConfig& x0, const UpdateSchedule& sched, const Graph& g,
                         const LocalRule& rule, std::uint64_t seed, SpinConfig* final_out) {
    struct Ev {
        double t;
        int site;
        int index;
    };
    std::vector<Ev> evs;
    for (int v = 0; v < sched.n(); ++v)
        for (int i = 1; i <= sched.count(v); ++i) evs.push_back({sched.time_of({v, i}), v, i});
    std::sort(evs.begin(), evs.end(), [](const Ev& a, const Ev& b) {
        return a.t < b.t || (a.t == b.t && a.site < b.site);
    });
    SpinConfig x = x0;
    Trajectory out(static_cast<std::size_t>(sched.n()));
    for (int v = 0; v < sched.n(); ++v)
        out[static_cast<std::size_t>(v)].resize(static_cast<std::size_t>(sched.count(v)));
    for (const Ev& e : evs) {
        auto inc = g.inclusive_neighborhood(e.site);
        std::vector<int> tau(inc.size());
        for (std::size_t s = 0; s < inc.size(); ++s)
            tau[s] = x[static_cast<std::size_t>(inc[s])];
        Distribution d = rule.evaluate(e.site, tau);
        const int val = sample(d, SeedStream{seed, UpdateId{e.site, e.index}, rule.spin_count()});
        x[static_cast<std::size_t>(e.site)] = val;
        out[static_cast<std::size_t>(e.site)][static_cast<std::size_t>(e.index - 1)] = val;
    }
    if (final_out) *final_out = x;
    return out;
}

struct Case {
    Graph g;
    ModelSpec spec;
    double T;
    std::uint64_t seed;
};

Case random_case(std::mt19937_64& rng, int which) {
    const int n = 2 + static_cast<int>(rng() % 29);
    Graph g = random_graph(rng, n, 5);
    ModelSpec spec;
    switch (which % 4) {
        case 0: spec = ModelSpec::ising_glauber(0.5 + 0.1 * static_cast<double>(rng() % 16)); break;
        case 1: spec = ModelSpec::ising_metropolis(0.5 + 0.1 * static_cast<double>(rng() % 16)); break;
        case 2: spec = ModelSpec::potts_glauber(3 + static_cast<int>(rng() % 3), 1.2); break;
        default: spec = ModelSpec::coloring_glauber(g.max_degree() + 2); break;
    }
    const double T = 0.25 + 0.25 * static_cast<double>(rng() % 24);
    return Case{std::move(g), std::move(spec), T, rng()};
}

}  // namespace

TEST_CASE("zero horizon: the initial configuration is the fixpoint") {
    Graph g = path_graph(4);
    auto spec = ModelSpec::ising_glauber(1.5);
    auto rule = make_rule(spec, g);
    SpinConfig x0{1, 0, 1, 0};
    UpdateSchedule sched = generate_schedule(4, 0.0, 5);
    FixpointResult r = simulate_fixpoint(x0, sched, g, *rule, EngineConfig{});
    CHECK(r.final == x0);
    CHECK(r.telemetry.iterations == 1);
    REQUIRE(r.telemetry.changed_per_iteration.size() == 1);
    CHECK(r.telemetry.changed_per_iteration[0] == 0);
    CHECK(r.telemetry.total_updates == 0);
    CHECK(r.telemetry.max_depth == 0);
    for (const auto& row : r.values) CHECK(row.empty());
}

TEST_CASE("sequential replay equals the independent in-test oracle") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 30; ++t) {
        Case c = random_case(rng, t);
        auto rule = make_rule(c.spec, c.g);
        UpdateSchedule sched = generate_schedule(c.g.n(), c.T, c.seed);
        SpinConfig x0(static_cast<std::size_t>(c.g.n()), 0);
        SpinConfig oracle_final;
        Trajectory oracle = oracle_replay(x0, sched, c.g, *rule, c.seed, &oracle_final);
        SequentialResult seq = simulate_sequential(x0, sched, c.g, *rule, c.seed);
        CHECK(seq.values == oracle);
        CHECK(seq.final == oracle_final);
    }
}

TEST_CASE("fixpoint trajectory equals sequential replay on random cases") {
    std::mt19937_64 rng(2718281);
    int checked = 0;
    for (int t = 0; t < 150; ++t) {
        Case c = random_case(rng, t);
        auto rule = make_rule(c.spec, c.g);
        UpdateSchedule sched = generate_schedule(c.g.n(), c.T, c.seed);
        SpinConfig x0(static_cast<std::size_t>(c.g.n()), 0);
        EngineConfig cfg;
        cfg.master_seed = c.seed;
        FixpointResult fix = simulate_fixpoint(x0, sched, c.g, *rule, cfg);
        SequentialResult seq = simulate_sequential(x0, sched, c.g, *rule, c.seed);
        REQUIRE(fix.values == seq.values);
        REQUIRE(fix.final == seq.final);
        // termination bounds, both the worst case and the depth-driven one
        PredecessorTable pred(sched, c.g);
        DepthInfo depth = update_depths(sched, c.g, pred);
        CHECK(fix.telemetry.iterations <= sched.total_updates() + 1);
        CHECK(fix.telemetry.iterations <= depth.max_depth + 1);
        CHECK(fix.telemetry.max_depth == depth.max_depth);
        CHECK(fix.telemetry.total_updates == sched.total_updates());
        REQUIRE(!fix.telemetry.changed_per_iteration.empty());
        CHECK(fix.telemetry.changed_per_iteration.back() == 0);
        ++checked;
    }
    CHECK(checked == 150);
}

TEST_CASE("worker count and batch width never change the answer") {
    std::mt19937_64 rng(31337);
    Case c = random_case(rng, 2);
    auto rule = make_rule(c.spec, c.g);
    UpdateSchedule sched = generate_schedule(c.g.n(), 8.0, 777);
    SpinConfig x0(static_cast<std::size_t>(c.g.n()), 0);

    std::vector<FixpointResult> results;
    for (int workers : {1, 2, 8}) {
        EngineConfig cfg;
        cfg.master_seed = 777;
        cfg.worker_count = workers;
        results.push_back(simulate_fixpoint(x0, sched, c.g, *rule, cfg));
    }
    for (std::size_t i = 1; i < results.size(); ++i) {
        CHECK(results[i].values == results[0].values);
        CHECK(results[i].final == results[0].final);
        CHECK(results[i].telemetry.iterations == results[0].telemetry.iterations);
        CHECK(results[i].telemetry.changed_per_iteration ==
              results[0].telemetry.changed_per_iteration);
    }
    for (int width : {1, 3, 64}) {
        EngineConfig cfg;
        cfg.master_seed = 777;
        cfg.batch_width = width;
        FixpointResult r = simulate_fixpoint(x0, sched, c.g, *rule, cfg);
        CHECK(r.values == results[0].values);
        CHECK(r.final == results[0].final);
    }
}

TEST_CASE("a boundary-free rule settles in two sweeps") {
    // beta = 1 makes every Ising conditional uniform, so no update reads its
    // predecessors and the first sweep already lands on the fixpoint
    Graph g = cycle_graph(10);
    auto spec = ModelSpec::ising_glauber(1.0);
    auto rule = make_rule(spec, g);
    UpdateSchedule sched = generate_schedule(10, 6.0, 101);
    REQUIRE(sched.total_updates() > 0);
    SpinConfig x0(10, 0);
    EngineConfig cfg;
    cfg.master_seed = 101;
    FixpointResult r = simulate_fixpoint(x0, sched, g, *rule, cfg);
    CHECK(r.telemetry.iterations == 2);
    CHECK(r.telemetry.changed_per_iteration.back() == 0);
}

TEST_CASE("hand-built schedule: replay matches the worked example") {
    Graph g = path_graph(2);
    auto spec = ModelSpec::ising_glauber(2.0);
    auto rule = make_rule(spec, g);
    UpdateSchedule sched;
    sched.horizon = 10.0;
    sched.times = {{1.0, 4.0, 6.0}, {2.0, 5.0}};
    sched.validate();
    SpinConfig x0{0, 0};
    const std::uint64_t seed = 4242;
    SpinConfig oracle_final;
    Trajectory oracle = oracle_replay(x0, sched, g, *rule, seed, &oracle_final);
    SequentialResult seq = simulate_sequential(x0, sched, g, *rule, seed);
    EngineConfig cfg;
    cfg.master_seed = seed;
    FixpointResult fix = simulate_fixpoint(x0, sched, g, *rule, cfg);
    CHECK(seq.values == oracle);
    CHECK(fix.values == oracle);
    CHECK(fix.final == oracle_final);
}

TEST_CASE("degenerate coloring boundary surfaces deterministically") {
    Graph g = path_graph(3);
    auto spec = ModelSpec::coloring_glauber(2);
    auto rule = make_rule(spec, g);
    // find a seed whose schedule updates the middle site
    std::uint64_t seed = 0;
    UpdateSchedule sched;
    for (std::uint64_t s = 1; s < 50; ++s) {
        sched = generate_schedule(3, 4.0, s);
        if (sched.count(1) > 0) {
            seed = s;
            break;
        }
    }
    REQUIRE(seed != 0);
    SpinConfig x0{0, 0, 1};  // proper, but the middle vertex sees both colours
    CHECK_THROWS_AS(simulate_sequential(x0, sched, g, *rule, seed),
                    DegenerateDistributionError);
    for (int workers : {1, 4}) {
        EngineConfig cfg;
        cfg.master_seed = seed;
        cfg.worker_count = workers;
        CHECK_THROWS_AS(simulate_fixpoint(x0, sched, g, *rule, cfg),
                        DegenerateDistributionError);
    }
}

TEST_CASE("iteration cap converts non-convergence into a diagnostic") {
    Graph g = path_graph(6);
    auto spec = ModelSpec::ising_glauber(2.0);
    auto rule = make_rule(spec, g);
    UpdateSchedule sched = generate_schedule(6, 6.0, 99);
    PredecessorTable pred(sched, g);
    REQUIRE(update_depths(sched, g, pred).max_depth >= 2);  // needs > 1 sweep
    SpinConfig x0(6, 0);
    EngineConfig cfg;
    cfg.master_seed = 99;
    cfg.max_iterations = 1;
    CHECK_THROWS_AS(simulate_fixpoint(x0, sched, g, *rule, cfg), DiagnosticError);
}

TEST_CASE("input validation at the engine boundary") {
    Graph g = path_graph(3);
    auto spec = ModelSpec::ising_glauber(1.5);
    auto rule = make_rule(spec, g);
    UpdateSchedule sched = generate_schedule(3, 1.0, 1);
    SpinConfig wrong_len{0, 0};
    EngineConfig cfg;
    CHECK_THROWS_AS(simulate_fixpoint(wrong_len, sched, g, *rule, cfg), InputError);
    SpinConfig bad_spin{0, 2, 0};
    CHECK_THROWS_AS(simulate_fixpoint(bad_spin, sched, g, *rule, cfg), InputError);
    CHECK_THROWS_AS(simulate_sequential(bad_spin, sched, g, *rule, 1), InputError);
}

TEST_CASE("chunked driver: boundary cases and telemetry bookkeeping") {
    Graph g = cycle_graph(6);
    auto spec = ModelSpec::potts_glauber(3, 1.4);
    auto rule = make_rule(spec, g);
    SpinConfig x0(6, 0);

    EngineConfig cfg;
    cfg.master_seed = 12345;
    cfg.chunk_length = 2.0;

    // zero horizon: nothing happens
    SimulationResult r0 = simulate_chunked(x0, 0.0, g, *rule, cfg);
    CHECK(r0.final == x0);
    CHECK(r0.iterations_per_chunk.empty());
    CHECK(r0.total_updates == 0);

    // horizon below one chunk: exactly the fixpoint run under sub-seed 0
    SimulationResult r1 = simulate_chunked(x0, 1.5, g, *rule, cfg);
    REQUIRE(r1.iterations_per_chunk.size() == 1);
    UpdateSchedule sched0 = generate_schedule(6, 1.5, chunk_seed(12345, 0));
    EngineConfig sub = cfg;
    sub.master_seed = chunk_seed(12345, 0);
    FixpointResult direct = simulate_fixpoint(x0, sched0, g, *rule, sub);
    CHECK(r1.final == direct.final);
    CHECK(r1.total_updates == direct.telemetry.total_updates);
    CHECK(r1.max_depth_observed == direct.telemetry.max_depth);

    // multi-chunk: counters add up across chunks
    SimulationResult r3 = simulate_chunked(x0, 7.0, g, *rule, cfg);
    CHECK(r3.iterations_per_chunk.size() == 4);  // 2 + 2 + 2 + 1
    const auto iter_sum = std::accumulate(r3.iterations_per_chunk.begin(),
                                          r3.iterations_per_chunk.end(), std::int64_t{0});
    CHECK(static_cast<std::int64_t>(r3.changed_per_iteration.size()) == iter_sum);
    CHECK(r3.total_updates > 0);
    // feeding chunk finals forward is deterministic
    SimulationResult r3b = simulate_chunked(x0, 7.0, g, *rule, cfg);
    CHECK(r3b.final == r3.final);
    CHECK(r3b.iterations_per_chunk == r3.iterations_per_chunk);
}

TEST_CASE("single-site chain: chunking leaves the output law alone") {
    Graph g1 = Graph::build(1, std::span<const std::pair<int, int>>{});
    auto spec = ModelSpec::ising_glauber(1.0, {3.0});
    auto rule = make_rule(spec, g1);
    SpinConfig x0{0};
    const int kRuns = 40000;
    double p1[2] = {0.0, 0.0};
    int which = 0;
    for (double chunk : {0.5, 2.0}) {
        EngineConfig cfg;
        cfg.chunk_length = chunk;
        std::int64_t ones = 0;
        for (int r = 0; r < kRuns; ++r) {
            cfg.master_seed = 0x51D0000ULL + static_cast<std::uint64_t>(r);
            SimulationResult res = simulate_chunked(x0, 8.0, g1, *rule, cfg);
            ones += res.final[0];
        }
        p1[which++] = static_cast<double>(ones) / kRuns;
    }
    // stationary law of the one-site chain puts 3/4 on spin 1
    CHECK(std::abs(p1[0] - 0.75) <= 0.01);
    CHECK(std::abs(p1[1] - 0.75) <= 0.01);
    CHECK(std::abs(p1[0] - p1[1]) <= 0.01);
}

TEST_CASE("iteration statistics and envelope fitting") {
    std::vector<int> counts{3, 5, 7, 9, 11};
    IterationSummary s = iteration_statistics(counts);
    CHECK(s.mean == doctest::Approx(7.0));
    CHECK(s.max == 11);
    CHECK(s.p95 == doctest::Approx(11.0));  // nearest rank on 5 items

    // exactly affine data is recovered with negligible residual
    std::vector<EnvelopePoint> pts{
        {100, 1.0, 2.0 * 1.0 + 3.0 * std::log2(100.0) + 4.0},
        {100, 5.0, 2.0 * 5.0 + 3.0 * std::log2(100.0) + 4.0},
        {1000, 2.0, 2.0 * 2.0 + 3.0 * std::log2(1000.0) + 4.0},
        {10000, 7.0, 2.0 * 7.0 + 3.0 * std::log2(10000.0) + 4.0},
    };
    EnvelopeFit fit = fit_iteration_envelope(pts);
    CHECK(fit.max_rel_residual <= 1e-6);
    CHECK(fit.c_T == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(fit.c_log2n == doctest::Approx(3.0).epsilon(1e-3));
    CHECK(fit.c_const == doctest::Approx(4.0).epsilon(1e-2));

    // collinear design (T proportional to log2 n) still fits thanks to the ridge
    std::vector<EnvelopePoint> col{
        {100, std::log(100.0), 10.0},
        {1000, std::log(1000.0), 15.0},
        {10000, std::log(10000.0), 20.0},
    };
    EnvelopeFit cfit = fit_iteration_envelope(col);
    CHECK(cfit.max_rel_residual <= 1e-4);
}

TEST_CASE("long-horizon stationarity on a coupled pair (law against enumeration)") {
    // two-site Ising with activity: run many independent chunked simulations
    // and compare the final-state histogram against the exact Gibbs law
    Graph g = path_graph(2);
    auto spec = ModelSpec::ising_glauber(2.0, {1.0, 2.0});
    auto rule = make_rule(spec, g);
    auto ispec = spec;
    auto table = oracle_gibbs(ispec, g);
    SpinConfig x0{0, 0};
    const int kRuns = 20000;
    std::vector<std::int64_t> hist(4, 0);
    EngineConfig cfg;
    for (int r = 0; r < kRuns; ++r) {
        cfg.master_seed = 0xAAA000ULL + static_cast<std::uint64_t>(r);
        SimulationResult res = simulate_chunked(x0, 16.0, g, *rule, cfg);
        ++hist[static_cast<std::size_t>(res.final[0] + 2 * res.final[1])];
    }
    double tv = 0.0;
    for (int i = 0; i < 4; ++i)
        tv += std::abs(static_cast<double>(hist[static_cast<std::size_t>(i)]) / kRuns -
                       table[static_cast<std::size_t>(i)]);
    tv /= 2.0;
    INFO("tv = " << tv);
    CHECK(tv <= 0.015);
}
