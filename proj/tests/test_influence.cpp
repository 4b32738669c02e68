#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "spinsim/errors.hpp"
#include "spinsim/graph.hpp"
#include "spinsim/influence.hpp"
#include "spinsim/model.hpp"
#include "test_util.hpp"

using namespace spinsim;
using namespace testutil;

namespace {

// Test-side influence of u on v by explicit enumeration over all boundary
// pairs differing only at u; independent of the library loop structure.
double oracle_influence(const LocalRule& rule, const Graph& g, int u, int v) {
    const int q = rule.spin_count();
    auto inc = g.inclusive_neighborhood(v);
    int slot = -1;
    for (std::size_t s = 0; s < inc.size(); ++s)
        if (inc[s] == u) slot = static_cast<int>(s);
    if (slot < 0) return 0.0;
    std::size_t total = 1;
    for (std::size_t s = 0; s < inc.size(); ++s) total *= static_cast<std::size_t>(q);
    double best = 0.0;
    std::vector<int> tau(inc.size());
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t r = idx;
        for (std::size_t s = 0; s < inc.size(); ++s) {
            tau[s] = static_cast<int>(r % static_cast<std::size_t>(q));
            r /= static_cast<std::size_t>(q);
        }
        Distribution base = rule.evaluate(v, tau);
        std::vector<int> tau2 = tau;
        for (int alt = 0; alt < q; ++alt) {
            if (alt == tau[static_cast<std::size_t>(slot)]) continue;
            tau2[static_cast<std::size_t>(slot)] = alt;
            best = std::max(best, tv_distance(base, rule.evaluate(v, tau2)));
        }
    }
    return best;
}

}  // namespace

TEST_CASE("single edge Ising Glauber beta=2: adjacent influence 1/3, zero diagonal") {
    Graph g = path_graph(2);
    auto spec = ModelSpec::ising_glauber(2.0);
    auto rule = glauber_rule(spec, g);
    CHECK(influence_entry(*rule, g, 1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(influence_entry(*rule, g, 0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(influence_entry(*rule, g, 0, 0) == 0.0);  // heat bath ignores the own spin
    auto rho = influence_matrix(spec, g);
    CHECK(rho.entry(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(rho.entry(0, 0) == 0.0);
}

TEST_CASE("single edge Metropolis beta=2: self-influence 1/4 is genuinely nonzero") {
    Graph g = path_graph(2);
    auto spec = ModelSpec::ising_metropolis(2.0);
    auto rule = metropolis_rule(spec, g);
    CHECK(influence_entry(*rule, g, 0, 0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(influence_entry(*rule, g, 1, 0) == doctest::Approx(0.25).epsilon(1e-12));
    auto rho = influence_matrix(spec, g);
    CHECK(rho.entry(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(rho.entry(1, 1) == doctest::Approx(0.25).epsilon(1e-12));
    // diagonal contributes to the norms
    CHECK(operator_norm(rho, NormP::Inf) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("4-cycle Ising beta=2: entries 3/10, norms 3/5 in all three senses") {
    // conditional P(1) over spin-1 neighbour counts k=0,1,2 is 1/5, 1/2, 4/5,
    // so the largest single-neighbour swing is 3/10 and each row/column holds
    // two such entries.
    Graph g = cycle_graph(4);
    auto spec = ModelSpec::ising_glauber(2.0);
    auto rule = glauber_rule(spec, g);
    auto rho = influence_matrix(spec, g);
    for (const auto& [u, v] : g.edges()) {
        CHECK(rho.entry(u, v) == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(rho.entry(v, u) == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(influence_entry(*rule, g, u, v) == doctest::Approx(0.3).epsilon(1e-12));
    }
    for (int v = 0; v < 4; ++v) CHECK(rho.entry(v, v) == 0.0);
    CHECK(rho.entry(0, 2) == 0.0);  // diagonal pair of the cycle: not adjacent
    CHECK(operator_norm(rho, NormP::One) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(operator_norm(rho, NormP::Inf) == doctest::Approx(0.6).epsilon(1e-12));
    // 0.3 * adjacency(C4) has spectral radius 0.6; pins the power iteration
    CHECK(operator_norm(rho, NormP::Two) == doctest::Approx(0.6).epsilon(1e-8));
}

TEST_CASE("triangle coloring q=5: adjacent influence 1/3") {
    Graph g = complete_graph(3);
    auto spec = ModelSpec::coloring_glauber(5);
    auto rule = glauber_rule(spec, g);
    for (const auto& [u, v] : g.edges()) {
        CHECK(influence_entry(*rule, g, u, v) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK(influence_entry(*rule, g, v, u) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
    CHECK(influence_entry(*rule, g, 0, 0) == 0.0);
    auto rho = influence_matrix(spec, g);
    CHECK(operator_norm(rho, NormP::Inf) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("non-adjacent distinct pairs have zero influence") {
    Graph g = path_graph(3);
    for (auto kind : {ModelKind::IsingGlauber, ModelKind::IsingMetropolis}) {
        ModelSpec spec{kind, 2, 1.7, {}};
        auto rule = make_rule(spec, g);
        CHECK(influence_entry(*rule, g, 0, 2) == 0.0);
        CHECK(influence_entry(*rule, g, 2, 0) == 0.0);
        auto rho = influence_matrix(spec, g);
        CHECK(rho.entry(0, 2) == 0.0);
        CHECK(rho.entry(2, 0) == 0.0);
    }
}

TEST_CASE("closed-form Ising influence equals brute force on a parameter grid") {
    for (int d = 1; d <= 6; ++d) {
        std::vector<std::pair<int, int>> e;
        for (int i = 1; i <= d; ++i) e.emplace_back(0, i);
        Graph g = Graph::build(d + 1, e);
        for (double beta : {0.5, 0.9, 1.0, 1.1, 2.0}) {
            for (double lam : {0.5, 1.0, 2.0}) {
                std::vector<double> lambda(static_cast<std::size_t>(d) + 1, lam);
                auto spec = ModelSpec::ising_glauber(beta, lambda);
                auto fast = influence_matrix_ising_glauber(spec, g);
                auto rule = glauber_rule(spec, g);
                auto brute = influence_matrix_brute(*rule, g);
                for (int u = 0; u <= d; ++u)
                    for (int v = 0; v <= d; ++v)
                        CHECK(fast.entry(u, v) ==
                              doctest::Approx(brute.entry(u, v)).epsilon(1e-10));
            }
        }
    }
    // mixed per-site activities on an irregular graph
    std::mt19937_64 rng(5);
    Graph g = random_graph(rng, 8, 4);
    std::vector<double> lambda;
    for (int v = 0; v < 8; ++v) lambda.push_back(0.5 + 0.3 * static_cast<double>(v % 5));
    auto spec = ModelSpec::ising_glauber(1.3, lambda);
    auto fast = influence_matrix_ising_glauber(spec, g);
    auto rule = glauber_rule(spec, g);
    auto brute = influence_matrix_brute(*rule, g);
    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v)
            CHECK(fast.entry(u, v) == doctest::Approx(brute.entry(u, v)).epsilon(1e-10));
}

TEST_CASE("brute force agrees with the in-test enumeration oracle") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 6; ++t) {
        Graph g = random_graph(rng, 5, 3);
        std::vector<ModelSpec> specs;
        specs.push_back(ModelSpec::ising_metropolis(0.6 + 0.4 * t));
        specs.push_back(ModelSpec::potts_glauber(3, 1.5));
        specs.push_back(ModelSpec::coloring_glauber(g.max_degree() + 2));
        for (const auto& spec : specs) {
            auto rule = make_rule(spec, g);
            auto rho = influence_matrix(spec, g);
            for (int u = 0; u < g.n(); ++u)
                for (int v = 0; v < g.n(); ++v)
                    CHECK(rho.entry(u, v) ==
                          doctest::Approx(oracle_influence(*rule, g, u, v)).epsilon(1e-12));
        }
    }
}

TEST_CASE("operator norms: hand-built matrices") {
    // single off-diagonal entry 0.5 in a 2x2 matrix
    std::vector<std::vector<std::pair<int, double>>> cols(2);
    cols[1] = {{0, 0.5}};
    InfluenceMatrix m(2, cols);
    CHECK(operator_norm(m, NormP::One) == doctest::Approx(0.5));
    CHECK(operator_norm(m, NormP::Inf) == doctest::Approx(0.5));
    CHECK(operator_norm(m, NormP::Two) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(m.entry(0, 1) == 0.5);
    CHECK(m.entry(1, 0) == 0.0);
    CHECK(m.column_sum(1) == doctest::Approx(0.5));
    CHECK(m.row_sums()[0] == doctest::Approx(0.5));

    // diagonal matrix: all norms are the largest diagonal entry
    std::vector<std::vector<std::pair<int, double>>> dcols(2);
    dcols[0] = {{0, 0.3}};
    dcols[1] = {{1, 0.7}};
    InfluenceMatrix d(2, dcols);
    CHECK(operator_norm(d, NormP::One) == doctest::Approx(0.7));
    CHECK(operator_norm(d, NormP::Inf) == doctest::Approx(0.7));
    CHECK(operator_norm(d, NormP::Two) == doctest::Approx(0.7).epsilon(1e-8));

    // rank-one 2x2 with all entries 0.25: spectral norm is 0.5
    std::vector<std::vector<std::pair<int, double>>> rcols(2);
    rcols[0] = {{0, 0.25}, {1, 0.25}};
    rcols[1] = {{0, 0.25}, {1, 0.25}};
    InfluenceMatrix r(2, rcols);
    CHECK(operator_norm(r, NormP::Two) == doctest::Approx(0.5).epsilon(1e-8));

    // zero matrix: every norm is 0 and the power iteration exits cleanly
    InfluenceMatrix z(3, std::vector<std::vector<std::pair<int, double>>>(3));
    CHECK(operator_norm(z, NormP::One) == 0.0);
    CHECK(operator_norm(z, NormP::Inf) == 0.0);
    CHECK(operator_norm(z, NormP::Two) == 0.0);
}

TEST_CASE("edgeless Glauber models have identically zero influence") {
    Graph g = Graph::build(4, std::span<const std::pair<int, int>>{});
    auto spec = ModelSpec::ising_glauber(2.0, {1.0, 2.0, 3.0, 4.0});
    auto rho = influence_matrix(spec, g);
    for (int u = 0; u < 4; ++u)
        for (int v = 0; v < 4; ++v) CHECK(rho.entry(u, v) == 0.0);
    CHECK(operator_norm(rho, NormP::Two) == 0.0);
}

TEST_CASE("Riesz-Thorin interpolation holds on every computed matrix") {
    std::mt19937_64 rng(17);
    std::vector<InfluenceMatrix> batch;
    for (int t = 0; t < 8; ++t) {
        Graph g = random_graph(rng, 6 + static_cast<int>(rng() % 5), 4);
        batch.push_back(influence_matrix(ModelSpec::ising_glauber(0.6 + 0.2 * t), g));
        batch.push_back(influence_matrix(ModelSpec::ising_metropolis(1.4), g));
        batch.push_back(influence_matrix(ModelSpec::potts_glauber(3, 1.8), g));
        batch.push_back(influence_matrix(ModelSpec::coloring_glauber(g.max_degree() + 2), g));
    }
    for (const auto& rho : batch) {
        const double n1 = operator_norm(rho, NormP::One);
        const double n2 = operator_norm(rho, NormP::Two);
        const double ni = operator_norm(rho, NormP::Inf);
        CHECK(n2 <= std::sqrt(n1 * ni) + 1e-10);
    }
}

TEST_CASE("capacity guards on the brute-force path") {
    // degree 21 breaks the neighbour cap even for q=2
    std::vector<std::pair<int, int>> e;
    for (int i = 1; i <= 21; ++i) e.emplace_back(0, i);
    Graph star21 = Graph::build(22, e);
    auto spec = ModelSpec::ising_metropolis(1.5);
    auto rule = metropolis_rule(spec, star21);
    CHECK_THROWS_AS(influence_matrix_brute(*rule, star21), CapacityError);
    CHECK_THROWS_AS(influence_entry(*rule, star21, 1, 0), CapacityError);

    // q^(deg+1) = 32^5 = 2^25 overflows the per-column budget
    std::vector<std::pair<int, int>> e4;
    for (int i = 1; i <= 4; ++i) e4.emplace_back(0, i);
    Graph star4 = Graph::build(5, e4);
    auto pspec = ModelSpec::potts_glauber(32, 1.1);
    auto prule = glauber_rule(pspec, star4);
    CHECK_THROWS_AS(influence_matrix_brute(*prule, star4), CapacityError);

    // the Ising closed form has no such limits
    std::vector<std::pair<int, int>> e25;
    for (int i = 1; i <= 25; ++i) e25.emplace_back(0, i);
    Graph star25 = Graph::build(26, e25);
    auto ispec = ModelSpec::ising_glauber(1.01);
    auto rho = influence_matrix(ispec, star25);
    CHECK(rho.entry(1, 0) > 0.0);
    CHECK(rho.entry(1, 0) == doctest::Approx(rho.entry(25, 0)).epsilon(1e-12));
}
