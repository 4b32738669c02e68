#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace spinsim {

// Finite simple undirected graph on vertices {0,...,n-1}.  Neighbour lists
// are sorted ascending; the inclusive neighbourhood of v additionally
// contains v itself (at its sorted position), which is the index set local
// rules read.
class Graph {
public:
    static Graph build(int n, std::span<const std::pair<int, int>> edges);

    int n() const { return n_; }
    std::int64_t edge_count() const { return static_cast<std::int64_t>(edges_.size()); }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    int degree(int v) const { return static_cast<int>(adj_[static_cast<std::size_t>(v)].size()); }
    int max_degree() const { return max_degree_; }

    std::span<const int> neighbors(int v) const { return adj_[static_cast<std::size_t>(v)]; }
    std::span<const int> inclusive_neighborhood(int v) const {
        return inc_[static_cast<std::size_t>(v)];
    }
    // Position of v inside inclusive_neighborhood(v).
    int self_slot(int v) const { return self_pos_[static_cast<std::size_t>(v)]; }

    bool adjacent(int u, int v) const;

private:
    int n_ = 0;
    int max_degree_ = 0;
    std::vector<std::pair<int, int>> edges_;       // u < v, sorted, unique
    std::vector<std::vector<int>> adj_;
    std::vector<std::vector<int>> inc_;
    std::vector<int> self_pos_;
};

// A spin configuration is one spin per vertex; validity against a spin count
// is checked where configurations enter the API.
using SpinConfig = std::vector<int>;

void validate_config(const SpinConfig& x, int n, int q);

}  // namespace spinsim
