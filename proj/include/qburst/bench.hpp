#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qburst/demosaic.hpp"
#include "qburst/flow.hpp"
#include "qburst/merge.hpp"
#include "qburst/quanta_sim.hpp"
#include "qburst/report.hpp"
#include "qburst/synthetic.hpp"

namespace qburst::bench {

enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 1,
    kDataError = 2,
    kSelftestFailure = 3,
};

/// Bad or missing data (corpus, manifest entries, count mismatches).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NamedMergeConfig {
    std::string name;
    MergeConfig config;
};

/// Adaptive merge at delta 0.05, 0.5 and 1.0.
std::vector<NamedMergeConfig> default_merge_configs();

/// CFA choice for a run: none (monochrome), fixed, or drawn per sequence.
struct PatternChoice {
    enum class Kind { None, Fixed, Random } kind = Kind::Fixed;
    BayerPattern fixed = BayerPattern::RGGB;
};

struct BenchmarkSpec {
    /// Directory of sequences (subdirectories of PNG frames) and/or single PNGs.
    std::optional<std::filesystem::path> corpus;
    /// Generated in-process when set; may be combined with a corpus.
    std::optional<SyntheticScene> synthetic;
    std::string synthetic_name = "synthetic";

    SamplingProtocol protocol = SamplingProtocol::BlurFree7;
    double alpha = 1.0;
    double dark_rate = 0.0;
    PatternChoice pattern;
    double fps = 1000.0;
    int window = 11;
    std::vector<NamedMergeConfig> merge_configs = default_merge_configs();
    BlockMatchParams block_matching;
    double validity_factor = 3.0;
    DemosaicMethod demosaic = DemosaicMethod::Bilinear;
    bool white_balance = false;
    std::uint64_t seed = 0;
    std::filesystem::path out = "qburst_out";
    int threads = 1;
    /// Writes timing.json beside the reports; the reports never carry timing.
    bool record_timing = false;

    /// Throws InvalidArgument on violated invariants.
    void validate() const;
};

BenchmarkSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const BenchmarkSpec& spec);
nlohmann::json merge_config_to_json(const NamedMergeConfig& cfg);
BenchmarkSpec load_spec(const std::filesystem::path& path);

struct SimulateResult {
    std::size_t sequences = 0;
    std::size_t nano_bursts = 0;
    std::size_t binary_frames = 0;
};
SimulateResult run_simulate(const BenchmarkSpec& spec);

struct ReconstructResult {
    std::size_t reconstructions = 0;
};
ReconstructResult run_reconstruct(const BenchmarkSpec& spec);

std::vector<ReconReport> run_evaluate(const BenchmarkSpec& spec);

/// max(0, bursts - window + 1) windows at stride 1.
std::size_t window_count(std::size_t bursts, int window) noexcept;

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SelftestOptions {
    /// Flip one payload bit between write and read.
    bool inject_bitflip = false;
    /// Sample with a rate 10% above the one the calibration expects.
    bool inject_wrong_p = false;
    std::uint64_t seed = 0;
    int threads = 1;
};

std::vector<CheckResult> run_selftest(const SelftestOptions& options);

}  // namespace qburst::bench
