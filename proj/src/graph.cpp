#include "spinsim/graph.hpp"

#include <algorithm>
#include <string>

#include "spinsim/errors.hpp"

namespace spinsim {

Graph Graph::build(int n, std::span<const std::pair<int, int>> edges) {
    if (n < 1) throw InputError("Graph: vertex count must be >= 1, got " + std::to_string(n));
    Graph g;
    g.n_ = n;
    g.edges_.reserve(edges.size());
    for (auto [u, v] : edges) {
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw InputError("Graph: edge (" + std::to_string(u) + "," + std::to_string(v) +
                             ") out of range for n=" + std::to_string(n));
        if (u == v)
            throw InputError("Graph: self-loop at vertex " + std::to_string(u));
        if (u > v) std::swap(u, v);
        g.edges_.emplace_back(u, v);
    }
    std::sort(g.edges_.begin(), g.edges_.end());
    g.edges_.erase(std::unique(g.edges_.begin(), g.edges_.end()), g.edges_.end());

    g.adj_.assign(static_cast<std::size_t>(n), {});
    for (auto [u, v] : g.edges_) {
        g.adj_[static_cast<std::size_t>(u)].push_back(v);
        g.adj_[static_cast<std::size_t>(v)].push_back(u);
    }
    g.inc_.assign(static_cast<std::size_t>(n), {});
    g.self_pos_.assign(static_cast<std::size_t>(n), 0);
    for (int v = 0; v < n; ++v) {
        auto& a = g.adj_[static_cast<std::size_t>(v)];
        std::sort(a.begin(), a.end());
        g.max_degree_ = std::max(g.max_degree_, static_cast<int>(a.size()));
        auto& inc = g.inc_[static_cast<std::size_t>(v)];
        inc = a;
        auto it = std::lower_bound(inc.begin(), inc.end(), v);
        g.self_pos_[static_cast<std::size_t>(v)] = static_cast<int>(it - inc.begin());
        inc.insert(it, v);
    }
    return g;
}

bool Graph::adjacent(int u, int v) const {
    if (u == v) return false;
    const auto& a = adj_[static_cast<std::size_t>(u)];
    return std::binary_search(a.begin(), a.end(), v);
}

void validate_config(const SpinConfig& x, int n, int q) {
    if (static_cast<int>(x.size()) != n)
        throw InputError("configuration has " + std::to_string(x.size()) +
                         " entries, expected " + std::to_string(n));
    for (int v = 0; v < n; ++v)
        if (x[static_cast<std::size_t>(v)] < 0 || x[static_cast<std::size_t>(v)] >= q)
            throw InputError("configuration entry at vertex " + std::to_string(v) +
                             " outside {0,...," + std::to_string(q - 1) + "}");
}

}  // namespace spinsim
