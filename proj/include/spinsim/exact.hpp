#pragma once

#include <cstdint>
#include <vector>

#include "spinsim/graph.hpp"
#include "spinsim/model.hpp"

namespace spinsim {

// Index codec for full configurations: index = sum_v sigma_v * q^v.
std::int64_t config_index(const SpinConfig& x, int q);
SpinConfig config_from_index(std::int64_t idx, int n, int q);

// Exact Gibbs distribution over all q^n configurations by enumeration,
// computed in log space.  Enforces q^n <= 2^24 (CapacityError beyond).
// Coloring specs weight proper colorings uniformly; an all-zero weight table
// (no proper coloring) is rejected.
std::vector<double> exact_gibbs_distribution(const ModelSpec& spec, const Graph& g);

// Marginal law of one site under a full distribution table.
std::vector<double> exact_site_marginal(const std::vector<double>& table, int n, int q, int v);

}  // namespace spinsim
