#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

namespace spinsim {

// Everything a run needs, embedded verbatim in every output so results are
// reproducible from the output file alone.  Unused knobs keep their defaults.
struct RunManifest {
    std::string subcommand;
    std::string graph_path;
    nlohmann::json model;  // parsed model JSON (canonical form)
    double T = 0.0;
    std::uint64_t seed = 0;
    std::string backend = "engine";  // engine | congest
    std::string output_path;         // empty = stdout
    std::int64_t runs = 1;
    int workers = 0;
    double chunk_len = 0.0;
    int congest_L = 0;
    int time_bits = 64;
    double threshold_C = 1.0;        // norm verdicts
    // coupling-bench / depth-stats shape parameters
    int q = 4;
    std::int64_t pairs = 50;
    std::int64_t draws = 100000;
    int n = 100;
    int deg = 4;
    std::int64_t seeds = 1000;
    std::string congest_msg_log;     // optional CSV path (congest backend)

    nlohmann::json to_json() const;
};

// Subcommand drivers.  Machine-readable results go to `out` (or the manifest
// output path), progress and diagnostics to `err`.  Return value is the
// process exit code: 0 ok, 1 verification failure, 2 input error, 3 capacity
// error.  Outputs for a fixed manifest are byte-deterministic; wall-clock
// timing is reported on `err` only.
int cmd_sample(const RunManifest& m, std::ostream& out, std::ostream& err);
int cmd_verify(const RunManifest& m, std::ostream& out, std::ostream& err);
int cmd_tv(const RunManifest& m, std::ostream& out, std::ostream& err);
int cmd_coupling_bench(const RunManifest& m, std::ostream& out, std::ostream& err);
int cmd_depth_stats(const RunManifest& m, std::ostream& out, std::ostream& err);
int cmd_norm(const RunManifest& m, std::ostream& out, std::ostream& err);

// Shared exception-to-exit-code boundary used by main() and the cmd tests.
int run_guarded(const RunManifest& m, int (*cmd)(const RunManifest&, std::ostream&, std::ostream&),
                std::ostream& out, std::ostream& err);

}  // namespace spinsim
