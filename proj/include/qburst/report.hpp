#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace qburst {

inline constexpr int kReportSchemaVersion = 1;

struct FrameMetrics {
    std::size_t index = 0;     ///< Nano-burst index of the window center.
    std::size_t gt_index = 0;  ///< GT frame the reconstruction is scored against.
    double psnr = 0.0;
    bool psnr_infinite = false;
    double ssim = 0.0;
};

/// Metrics of one sequence under one merge config.
struct ReconReport {
    std::string sequence;
    std::string config;
    std::vector<FrameMetrics> frames;
    /// Absent when fewer than two reconstructions exist.
    std::optional<double> e_star;
    std::size_t e_star_valid_pixels = 0;
    double timing_ms = 0.0;
    nlohmann::json config_snapshot;
    /// Externally computed metrics (e.g. learned perceptual scores) merged in by name.
    std::map<std::string, double> external;

    /// Mean over frames with finite PSNR; nullopt when every frame is infinite.
    std::optional<double> mean_psnr() const;
    double mean_ssim() const;
    std::size_t infinite_psnr_count() const;
};

struct AggregateRow {
    std::string config;
    std::string rule;  ///< "frame_weighted" or "sequence_mean"
    std::size_t sequences = 0;
    std::size_t frames = 0;
    std::optional<double> psnr;
    double ssim = 0.0;
    std::optional<double> e_star;
};

/// Cumulative rows per config. frame_weighted weights every sequence mean by
/// its frame count (PSNR by its finite-frame count); sequence_mean weights
/// sequences equally.
std::vector<AggregateRow> aggregate(const std::vector<ReconReport>& reports);

/// One CSV row per frame.
std::string reports_to_csv(const std::vector<ReconReport>& reports);
/// Nested per sequence, plus cumulative rows. Timing is included on request.
nlohmann::json reports_to_json(const std::vector<ReconReport>& reports, bool include_timing);
/// Fixed-width table with per-sequence rows and both cumulative rows.
std::string summary_table(const std::vector<ReconReport>& reports);

}  // namespace qburst
