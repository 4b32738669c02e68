#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "spinsim/distribution.hpp"
#include "spinsim/rng.hpp"

namespace spinsim {

// Rejection batches are capped at 64*q; the chance a valid distribution needs
// that many is (1-1/q)^(64*q*w), so hitting the cap means the stream or the
// distribution is broken.
inline constexpr int kMaxBatchFactor = 64;

// Default batch width when no graph context dictates one.
inline int default_batch_width(int q) { return q > 16 ? q : 16; }

struct SampleOutcome {
    int value = 0;
    std::int64_t accept_index = 0;  // 1-based index of the accepted pair
};

// Scan the proposal stream for the first j with Y_j < p(X_j) and return X_j.
// The output is distributed exactly as p (up to one part in 2^53 from the
// discrete acceptance levels), no matter what stream the pairs come from --
// this universality is what the whole consistency story rests on.
SampleOutcome sample_detailed(std::span<const double> p, const SeedStream& s);
int sample(std::span<const double> p, const SeedStream& s);
int sample(const Distribution& p, const SeedStream& s);

// Run two distributions against the same stream.  Both marginals are exact,
// and the agreement probability is at least the Jaccard similarity
// (1 - d_TV)/(1 + d_TV); the disagreement never exceeds twice the best
// possible, i.e. 2 * d_TV.
std::pair<int, int> coupled_sample_pair(std::span<const double> p, std::span<const double> q,
                                        const SeedStream& s);

// Memoizing batch-lazy wrapper around the same scan.  Pairs are materialized
// in batches of `width` and kept append-only, so repeated draws -- with
// whatever distributions -- replay identical proposals and the draw agrees
// exactly with sample() on the equivalent stream.
class ConsistSampler {
public:
    ConsistSampler() = default;
    ConsistSampler(SeedStream stream, int width);

    int draw(std::span<const double> p);
    std::size_t materialized() const { return pairs_.size(); }
    int width() const { return width_; }

private:
    SeedStream stream_;
    int width_ = 0;
    std::vector<SeedPair> pairs_;
};

// The tight family for couplings: k+1 distributions, the i-th uniform on
// {0,...,k} \ {i}, embedded in a spin space of size omega >= k+1.  Pairwise
// d_TV is 1/k and the minimum pairwise agreement of any universal coupling is
// exactly (k-1)/(k+1).
std::vector<Distribution> adversarial_family(int k, int omega);

}  // namespace spinsim
