#pragma once

#include <cstdint>

#include "spinsim/graph.hpp"

namespace spinsim {

// Deterministic graph generators for experiments and tests.

Graph path_graph(int n);
Graph cycle_graph(int n);
Graph complete_graph(int n);

// Configuration-model pairing with self-loops and duplicates dropped:
// every degree is <= d and most are exactly d ("d-regular-ish").
Graph random_near_regular_graph(int n, int d, std::uint64_t seed);

// Erdos-Renyi-style graph conditioned on max degree <= dmax.
Graph random_bounded_degree_graph(int n, int dmax, double edge_prob, std::uint64_t seed);

}  // namespace spinsim
