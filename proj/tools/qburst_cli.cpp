// qburst: simulate SPAD nano-bursts, reconstruct them, and score the result.
//
//   qburst simulate    --config bench.json [--seed N] [--out DIR] [--threads N]
//   qburst reconstruct --config bench.json ...
//   qburst evaluate    --config bench.json ...
//   qburst selftest    [--inject bitflip|wrong-p]
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 selftest failure.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qburst/bench.hpp"
#include "qburst/photon_cube.hpp"
#include "qburst/png_io.hpp"
#include "qburst/report.hpp"

using namespace qburst;
using namespace qburst::bench;

namespace {

struct GlobalFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> threads;
    std::optional<std::string> corpus;
    bool timing = false;
};

BenchmarkSpec resolve_spec(const GlobalFlags& flags) {
    BenchmarkSpec spec;
    if (!flags.config.empty()) spec = load_spec(flags.config);
    if (flags.seed) spec.seed = *flags.seed;
    if (flags.out) spec.out = *flags.out;
    if (flags.threads) spec.threads = *flags.threads;
    if (flags.corpus) spec.corpus = *flags.corpus;
    if (flags.timing) spec.record_timing = true;
    spec.validate();
    return spec;
}

int run_selftest_command(const SelftestOptions& options) {
    const auto results = run_selftest(options);
    bool ok = true;
    for (const auto& r : results) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        ok = ok && r.passed;
    }
    std::cout << (ok ? "selftest passed" : "selftest FAILED") << '\n';
    return ok ? kSuccess : kSelftestFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-photon burst simulation, reconstruction and evaluation"};
    app.require_subcommand(1);
    GlobalFlags flags;
    app.add_option("--config", flags.config, "Benchmark config (JSON)")->check(CLI::ExistingFile);
    app.add_option("--seed", flags.seed, "Master seed");
    app.add_option("--out", flags.out, "Output directory");
    app.add_option("--threads", flags.threads, "Worker threads")->check(CLI::PositiveNumber);

    auto* simulate = app.add_subcommand("simulate", "Simulate photon cubes and nano-bursts");
    simulate->add_option("--corpus", flags.corpus, "PNG corpus directory or file");
    auto* reconstruct = app.add_subcommand("reconstruct", "Reconstruct sliding burst windows");
    reconstruct->add_flag("--timing", flags.timing, "Write timing.json");
    auto* evaluate = app.add_subcommand("evaluate", "Score reconstructions against GT");
    evaluate->add_flag("--timing", flags.timing, "Include timing in report.json");
    auto* selftest = app.add_subcommand("selftest", "Run built-in statistical and format checks");
    std::string inject;
    selftest->add_option("--inject", inject, "Fault injection for testing the checks")
        ->check(CLI::IsMember({"bitflip", "wrong-p"}));

    // Global flags are accepted after the subcommand too.
    for (auto* sub : {simulate, reconstruct, evaluate, selftest}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        if (selftest->parsed()) {
            SelftestOptions options;
            options.inject_bitflip = inject == "bitflip";
            options.inject_wrong_p = inject == "wrong-p";
            if (flags.seed) options.seed = *flags.seed;
            if (flags.threads) options.threads = *flags.threads;
            return run_selftest_command(options);
        }
        const auto spec = resolve_spec(flags);
        if (simulate->parsed()) {
            const auto r = run_simulate(spec);
            std::cout << "simulated " << r.sequences << " sequence(s): " << r.nano_bursts
                      << " nano-bursts from " << r.binary_frames << " binary frames -> "
                      << spec.out.string() << '\n';
        } else if (reconstruct->parsed()) {
            const auto r = run_reconstruct(spec);
            std::cout << "wrote " << r.reconstructions << " reconstruction(s) to "
                      << spec.out.string() << '\n';
        } else if (evaluate->parsed()) {
            const auto reports = run_evaluate(spec);
            std::cout << summary_table(reports);
        }
        return kSuccess;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const CubeError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const PngError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    }
}
