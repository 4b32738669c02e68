#pragma once

#include <stdexcept>
#include <string>

namespace spinsim {

// Malformed or rejected input (bad graph file, bad model JSON, invalid
// parameter combinations).  CLI maps this to exit code 2.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// A requested computation exceeds a hard resource bound (enumeration budget,
// brute-force degree cap).  CLI maps this to exit code 3.
struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// A local rule produced no admissible spin (e.g. a coloring site whose
// neighbours exhaust the palette).  The configuration that triggered it is
// named in the message.
struct DegenerateDistributionError : std::runtime_error {
    explicit DegenerateDistributionError(const std::string& what) : std::runtime_error(what) {}
};

// Internal diagnostic: a sampler exhausted its batch cap, an iteration guard
// that must never fire fired, or power iteration failed to converge.  These
// indicate a broken stream or a bug, not bad user input.
struct DiagnosticError : std::runtime_error {
    explicit DiagnosticError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spinsim
