#pragma once

#include <cstdint>

#include "spinsim/errors.hpp"

namespace spinsim {

// Identifies the i-th update of a site.  Indices are 1-based; index 0 is
// reserved for "initial configuration" in predecessor tables.
struct UpdateId {
    int site = 0;
    int index = 0;

    friend bool operator==(const UpdateId&, const UpdateId&) = default;
};

// Domain-separation tags so the clock stream, the two seed-pair lanes and
// chunk sub-seeds never collide even for equal counters.
enum class Lane : std::uint64_t {
    Clock = 0x11,
    PairX = 0x22,
    PairY = 0x33,
    Chunk = 0x44,
};

// splitmix64 finalizer.  Bijective on 64-bit words; chained below as a
// counter-based generator so every drawn value is a pure function of its
// coordinates and no generator state is ever shared between updates.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_fields(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                 std::uint64_t c, Lane lane) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    h = mix64(h ^ static_cast<std::uint64_t>(lane));
    return h;
}

// 53-bit uniform on [0,1).
inline double uniform53(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Uniform on the open interval (0,1); used for exponential inter-arrivals so
// -log(1-u) is strictly positive and the per-site clock strictly increases.
inline double uniform_open(std::uint64_t h) {
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

// Unbiased map of a counter-derived hash into {0,...,q-1}: values in the
// truncated top range are rehashed deterministically, so the map stays a pure
// function of the inputs.  The rejection region has mass (2^64 mod q)/2^64;
// when q divides 2^64 the limit wraps to 0, meaning every value is accepted.
inline int uniform_int(std::uint64_t h, int q) {
    const std::uint64_t uq = static_cast<std::uint64_t>(q);
    const std::uint64_t limit = 0ULL - (0ULL - uq) % uq;  // largest multiple of q <= 2^64
    while (limit != 0 && h >= limit) h = mix64(h);
    return static_cast<int>(h % uq);
}

// One proposal of the rejection stream: X uniform on the spin space, Y a
// 53-bit uniform acceptance level.
struct SeedPair {
    int x = 0;
    double y = 0.0;
};

inline SeedPair derive_pair(std::uint64_t master_seed, UpdateId u, std::uint64_t j, int q) {
    if (q < 1) throw InputError("derive_pair: spin count must be >= 1");
    SeedPair p;
    p.x = uniform_int(hash_fields(master_seed, static_cast<std::uint64_t>(u.site),
                                  static_cast<std::uint64_t>(u.index), j, Lane::PairX),
                      q);
    p.y = uniform53(hash_fields(master_seed, static_cast<std::uint64_t>(u.site),
                                static_cast<std::uint64_t>(u.index), j, Lane::PairY));
    return p;
}

// Stateless view of the proposal stream attached to one update.  pair(j) is
// reproducible from (master_seed, update, j) alone, which is what makes
// resolving the same update in different iterations, processes or worker
// counts consistent.
struct SeedStream {
    std::uint64_t master_seed = 0;
    UpdateId update;
    int q = 2;

    SeedPair pair(std::uint64_t j) const { return derive_pair(master_seed, update, j, q); }
};

// Sub-seed for chunk c of a long run; independent of all per-update lanes.
inline std::uint64_t chunk_seed(std::uint64_t master_seed, std::uint64_t chunk_index) {
    return hash_fields(master_seed, chunk_index, 0, 0, Lane::Chunk);
}

}  // namespace spinsim
