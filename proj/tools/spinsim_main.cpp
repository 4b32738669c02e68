#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "spinsim/errors.hpp"
#include "spinsim/harness.hpp"
#include "spinsim/version.hpp"

namespace {

// Model argument: a path to a JSON file, or inline JSON when it starts with '{'.
nlohmann::json parse_model_arg(const std::string& arg) {
    try {
        if (!arg.empty() && arg.front() == '{') return nlohmann::json::parse(arg);
        std::ifstream f(arg);
        if (!f) throw spinsim::InputError("cannot open model file '" + arg + "'");
        nlohmann::json j;
        f >> j;
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw spinsim::InputError("model JSON: " + std::string(e.what()));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"continuous-time single-site spin dynamics: sampling engine, "
                 "coupling bench and network simulator"};
    app.set_version_flag("--version", spinsim::kVersion);
    app.require_subcommand(1);

    spinsim::RunManifest m;
    std::string model_arg;

    auto add_common = [&](CLI::App* sub, bool wants_instance) {
        if (wants_instance) {
            sub->add_option("--graph", m.graph_path, "graph file: 'n m' header then edge lines");
            sub->add_option("--model", model_arg, "model JSON (inline or a file path)");
        }
        sub->add_option("--T", m.T, "time horizon");
        sub->add_option("--seed", m.seed, "master seed");
        sub->add_option("--workers", m.workers, "worker threads (0 = all)");
    };

    CLI::App* sample = app.add_subcommand("sample", "run the sampler once, print final state");
    add_common(sample, true);
    sample->add_option("--backend", m.backend, "engine|congest");
    sample->add_option("--chunk-len", m.chunk_len, "chunk length (0 = ln n)");
    sample->add_option("--congest-L", m.congest_L, "explicit phase-II round count");
    sample->add_option("--time-bits", m.time_bits, "truncated time width, 16..64");
    sample->add_option("--congest-msg-log", m.congest_msg_log, "write per-message CSV here");
    sample->add_option("--out", m.output_path, "output JSON path (default stdout)");

    CLI::App* verify = app.add_subcommand("verify", "fixpoint (or congest) vs sequential replay");
    add_common(verify, true);
    verify->add_option("--backend", m.backend, "engine|congest");
    verify->add_option("--runs,--cases", m.runs, "number of seeded cases");
    verify->add_option("--congest-L", m.congest_L, "explicit phase-II round count");
    verify->add_option("--time-bits", m.time_bits, "truncated time width, 16..64");
    verify->add_option("--out", m.output_path, "output JSON path (default stdout)");

    CLI::App* tv = app.add_subcommand("tv", "sampled law vs exact enumeration (q^n <= 4096)");
    add_common(tv, true);
    tv->add_option("--backend", m.backend, "engine|congest");
    tv->add_option("--runs", m.runs, "sample size");
    tv->add_option("--chunk-len", m.chunk_len, "chunk length (0 = ln n)");
    tv->add_option("--congest-L", m.congest_L, "explicit phase-II round count");
    tv->add_option("--time-bits", m.time_bits, "truncated time width, 16..64");
    tv->add_option("--out", m.output_path, "output JSON path (default stdout)");

    CLI::App* cb = app.add_subcommand("coupling-bench", "agreement vs Jaccard bound, CSV");
    cb->add_option("--q", m.q, "spin space size");
    cb->add_option("--pairs", m.pairs, "random distribution pairs");
    cb->add_option("--draws", m.draws, "draws per pair");
    cb->add_option("--seed", m.seed, "master seed");
    cb->add_option("--out", m.output_path, "output CSV path (default stdout)");

    CLI::App* ds = app.add_subcommand("depth-stats", "max-depth tail vs analytic bound, CSV");
    ds->add_option("--n", m.n, "sites");
    ds->add_option("--deg", m.deg, "target degree of the random graph");
    ds->add_option("--T", m.T, "time horizon");
    ds->add_option("--seeds", m.seeds, "schedules to draw");
    ds->add_option("--seed", m.seed, "master seed");
    ds->add_option("--out", m.output_path, "output CSV path (default stdout)");

    CLI::App* norm = app.add_subcommand("norm", "influence matrix operator norms and verdicts");
    norm->add_option("--graph", m.graph_path, "graph file");
    norm->add_option("--model", model_arg, "model JSON (inline or a file path)");
    norm->add_option("--C", m.threshold_C, "user threshold for the norm verdicts");
    norm->add_option("--out", m.output_path, "output JSON path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!model_arg.empty()) m.model = parse_model_arg(model_arg);
    } catch (const spinsim::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    }

    int (*cmd)(const spinsim::RunManifest&, std::ostream&, std::ostream&) = nullptr;
    if (sample->parsed()) m.subcommand = "sample", cmd = spinsim::cmd_sample;
    if (verify->parsed()) m.subcommand = "verify", cmd = spinsim::cmd_verify;
    if (tv->parsed()) m.subcommand = "tv", cmd = spinsim::cmd_tv;
    if (cb->parsed()) m.subcommand = "coupling-bench", cmd = spinsim::cmd_coupling_bench;
    if (ds->parsed()) m.subcommand = "depth-stats", cmd = spinsim::cmd_depth_stats;
    if (norm->parsed()) m.subcommand = "norm", cmd = spinsim::cmd_norm;

    return spinsim::run_guarded(m, cmd, std::cout, std::cerr);
}
