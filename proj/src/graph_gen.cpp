#include "spinsim/graph_gen.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "spinsim/errors.hpp"

namespace spinsim {

Graph path_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
    return Graph::build(n, e);
}

Graph cycle_graph(int n) {
    if (n < 3) throw InputError("cycle_graph: need n >= 3");
    std::vector<std::pair<int, int>> e;
    for (int v = 0; v < n; ++v) e.emplace_back(v, (v + 1) % n);
    return Graph::build(n, e);
}

Graph complete_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) e.emplace_back(u, v);
    return Graph::build(n, e);
}

Graph random_near_regular_graph(int n, int d, std::uint64_t seed) {
    if (d < 0 || d >= n) throw InputError("random_near_regular_graph: need 0 <= d < n");
    std::mt19937_64 rng(seed);
    // Configuration model: shuffle d stubs per vertex, pair consecutively,
    // drop self-loops and duplicates.  Degrees never exceed d.
    std::vector<int> stubs;
    stubs.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
    for (int v = 0; v < n; ++v)
        for (int k = 0; k < d; ++k) stubs.push_back(v);
    std::shuffle(stubs.begin(), stubs.end(), rng);
    std::set<std::pair<int, int>> seen;
    std::vector<std::pair<int, int>> e;
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
        int u = stubs[i], v = stubs[i + 1];
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        if (seen.insert({u, v}).second) e.emplace_back(u, v);
    }
    return Graph::build(n, e);
}

Graph random_bounded_degree_graph(int n, int dmax, double edge_prob, std::uint64_t seed) {
    if (dmax < 0) throw InputError("random_bounded_degree_graph: dmax must be >= 0");
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution flip(edge_prob);
    std::vector<int> deg(static_cast<std::size_t>(n), 0);
    std::vector<std::pair<int, int>> e;
    // Visit pairs in shuffled order so the degree cap does not bias low indices.
    std::vector<std::pair<int, int>> all;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) all.emplace_back(u, v);
    std::shuffle(all.begin(), all.end(), rng);
    for (auto [u, v] : all) {
        if (deg[static_cast<std::size_t>(u)] >= dmax || deg[static_cast<std::size_t>(v)] >= dmax)
            continue;
        if (!flip(rng)) continue;
        ++deg[static_cast<std::size_t>(u)];
        ++deg[static_cast<std::size_t>(v)];
        e.emplace_back(u, v);
    }
    return Graph::build(n, e);
}

}  // namespace spinsim
