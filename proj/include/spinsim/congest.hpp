#pragma once

#include <cstdint>
#include <vector>

#include "spinsim/engine.hpp"
#include "spinsim/graph.hpp"
#include "spinsim/model.hpp"

namespace spinsim {

// Round-synchronous message-passing simulation of the fixpoint computation:
// Phase I floods truncated clock times so each node can build its predecessor
// rows locally; Phase II runs a fixed number L of sweeps in which every node
// re-resolves its own updates against the slices its neighbours sent the
// round before.  The simulator itself is centralized but nodes only ever read
// their own state and previous-round neighbour messages (auditable below).
struct CongestConfig {
    std::uint64_t master_seed = 0;
    int phase2_rounds = 0;        // 0 = caller must pass explicit L via default_phase2_rounds
    int time_bits = 64;           // b >= 16; >= 53 keeps full double fidelity
    int phase1_budget_bits = 0;   // 0 = max(64, 16 * ceil(log2(n+1)) * spin bits)
    int worker_count = 0;
    bool audit_reads = false;     // taint-tag every slice read (test sizes only)
    bool log_messages = false;    // materialize the per-round message log
};

struct Message {
    int sender = 0;
    int receiver = 0;
    int round = 0;  // 1-based within its phase
    int phase = 1;
    std::int64_t bit_size = 0;
};

// Order-preserving b-bit key of a clock time in (0, horizon).  At b = 64 the
// key is the raw bit pattern of the double (monotone and injective for
// positive finite values), so only exact double ties collide; below 64 bits
// the key is floor(t / horizon * 2^b) and distinct times closer than
// horizon * 2^-b can collide, which is what tie detection is for.
std::uint64_t truncate_time(double t, double horizon, int b);

// Exact payload sizes: Phase I sends M_v times at b bits each; Phase II sends
// M_u spins at ceil(log2 q) bits plus a ceil(log2(M_u+1))-bit count.
std::int64_t phase1_message_bits(std::int64_t count, int time_bits);
std::int64_t phase2_message_bits(std::int64_t count, int q);

// L from the convergence bound with ambient constant alpha=2 and failure
// budget eps = 1e-4: ceil((2*e*2*C + 1)*T + log2(n*1e4) + 1), C an upper
// bound on the influence row-sum norm.
int default_phase2_rounds(int n, double T, double influence_norm_inf);

struct NetworkTrace {
    int phase1_rounds = 0;
    int phase2_rounds = 0;
    std::int64_t total_messages = 0;
    std::int64_t total_bits = 0;
    std::int64_t max_message_bits = 0;
    std::int64_t max_phase2_message_bits = 0;
    bool tie_detected = false;     // some adjacent pair of updates collided after truncation
    bool fixpoint_reached = false; // slices stabilized strictly before round L ran out
    int fixpoint_round = 0;        // first round whose sweep changed nothing (0 if never)
    bool success = false;          // fixpoint_reached && !tie_detected
    int rounds() const { return phase1_rounds + phase2_rounds; }
};

struct CongestResult {
    SpinConfig final;
    Trajectory values;
    NetworkTrace trace;
    std::vector<Message> message_log;  // only when cfg.log_messages
};

CongestResult run_congest(const SpinConfig& x0, double T, const Graph& g,
                          const LocalRule& rule, const CongestConfig& cfg);

// Chunked variant mirroring simulate_chunked: fresh schedule and L per chunk
// of length ln n, traces accumulated (rounds add, maxima combine).
CongestResult run_congest_chunked(const SpinConfig& x0, double T, const Graph& g,
                                  const LocalRule& rule, const CongestConfig& cfg,
                                  double chunk_length = 0.0,
                                  double influence_norm_inf = -1.0);

struct MessageStats {
    int rounds = 0;
    std::int64_t total_messages = 0;
    std::int64_t total_bits = 0;
    std::int64_t max_message_bits = 0;
};

MessageStats message_stats(const NetworkTrace& trace);

}  // namespace spinsim
