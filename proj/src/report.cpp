#include "qburst/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace qburst {

namespace {

std::string fmt(double v, int precision = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v, int precision = 4) {
    return v ? fmt(*v, precision) : std::string("n/a");
}

nlohmann::json opt_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::optional<double> ReconReport::mean_psnr() const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& f : frames) {
        if (!f.psnr_infinite) {
            sum += f.psnr;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

double ReconReport::mean_ssim() const {
    if (frames.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& f : frames) sum += f.ssim;
    return sum / static_cast<double>(frames.size());
}

std::size_t ReconReport::infinite_psnr_count() const {
    std::size_t n = 0;
    for (const auto& f : frames) n += f.psnr_infinite ? 1 : 0;
    return n;
}

std::vector<AggregateRow> aggregate(const std::vector<ReconReport>& reports) {
    std::vector<std::string> configs;
    for (const auto& r : reports) {
        if (std::find(configs.begin(), configs.end(), r.config) == configs.end()) {
            configs.push_back(r.config);
        }
    }
    std::vector<AggregateRow> rows;
    for (const auto& config : configs) {
        AggregateRow fw;
        fw.config = config;
        fw.rule = "frame_weighted";
        AggregateRow sm;
        sm.config = config;
        sm.rule = "sequence_mean";
        double psnr_fw = 0.0, psnr_sm = 0.0, ssim_fw = 0.0, ssim_sm = 0.0;
        double e_fw = 0.0, e_sm = 0.0;
        std::size_t psnr_w = 0, psnr_n = 0, e_w = 0, e_n = 0;
        for (const auto& r : reports) {
            if (r.config != config || r.frames.empty()) continue;
            const std::size_t n = r.frames.size();
            ++fw.sequences;
            fw.frames += n;
            ssim_fw += r.mean_ssim() * static_cast<double>(n);
            ssim_sm += r.mean_ssim();
            if (const auto p = r.mean_psnr()) {
                const std::size_t finite = n - r.infinite_psnr_count();
                psnr_fw += *p * static_cast<double>(finite);
                psnr_w += finite;
                psnr_sm += *p;
                ++psnr_n;
            }
            if (r.e_star && std::isfinite(*r.e_star)) {
                e_fw += *r.e_star * static_cast<double>(n);
                e_w += n;
                e_sm += *r.e_star;
                ++e_n;
            }
        }
        if (fw.sequences == 0) continue;
        sm.sequences = fw.sequences;
        sm.frames = fw.frames;
        fw.ssim = ssim_fw / static_cast<double>(fw.frames);
        sm.ssim = ssim_sm / static_cast<double>(sm.sequences);
        if (psnr_w > 0) {
            fw.psnr = psnr_fw / static_cast<double>(psnr_w);
            sm.psnr = psnr_sm / static_cast<double>(psnr_n);
        }
        if (e_w > 0) {
            fw.e_star = e_fw / static_cast<double>(e_w);
            sm.e_star = e_sm / static_cast<double>(e_n);
        }
        rows.push_back(fw);
        rows.push_back(sm);
    }
    return rows;
}

std::string reports_to_csv(const std::vector<ReconReport>& reports) {
    std::ostringstream out;
    out << "schema_version,sequence,config,frame,gt_frame,psnr_db,psnr_infinite,ssim\n";
    for (const auto& r : reports) {
        for (const auto& f : r.frames) {
            out << kReportSchemaVersion << ',' << r.sequence << ',' << r.config << ',' << f.index
                << ',' << f.gt_index << ',' << (f.psnr_infinite ? "inf" : fmt(f.psnr)) << ','
                << (f.psnr_infinite ? 1 : 0) << ',' << fmt(f.ssim, 8) << '\n';
        }
    }
    return out.str();
}

nlohmann::json reports_to_json(const std::vector<ReconReport>& reports, bool include_timing) {
    nlohmann::json root;
    root["schema_version"] = kReportSchemaVersion;
    auto& seqs = root["sequences"] = nlohmann::json::array();
    for (const auto& r : reports) {
        nlohmann::json s;
        s["id"] = r.sequence;
        s["config"] = r.config;
        s["config_snapshot"] = r.config_snapshot;
        s["mean_psnr_db"] = opt_json(r.mean_psnr());
        s["infinite_psnr_frames"] = r.infinite_psnr_count();
        s["mean_ssim"] = r.mean_ssim();
        s["e_star"] = opt_json(r.e_star);
        s["e_star_valid_pixels"] = r.e_star_valid_pixels;
        if (include_timing) s["timing_ms"] = r.timing_ms;
        if (!r.external.empty()) s["external"] = r.external;
        auto& frames = s["frames"] = nlohmann::json::array();
        for (const auto& f : r.frames) {
            frames.push_back({{"frame", f.index},
                              {"gt_frame", f.gt_index},
                              {"psnr_db", f.psnr_infinite ? nlohmann::json(nullptr) : nlohmann::json(f.psnr)},
                              {"psnr_infinite", f.psnr_infinite},
                              {"ssim", f.ssim}});
        }
        seqs.push_back(std::move(s));
    }
    auto& cum = root["cumulative"] = nlohmann::json::array();
    for (const auto& row : aggregate(reports)) {
        cum.push_back({{"config", row.config},
                       {"rule", row.rule},
                       {"sequences", row.sequences},
                       {"frames", row.frames},
                       {"psnr_db", opt_json(row.psnr)},
                       {"ssim", row.ssim},
                       {"e_star", opt_json(row.e_star)}});
    }
    return root;
}

std::string summary_table(const std::vector<ReconReport>& reports) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-30s %-20s %7s %10s %8s %10s\n", "sequence", "config",
                  "frames", "PSNR[dB]", "SSIM", "E*");
    out << line;
    for (const auto& r : reports) {
        std::string psnr = fmt_opt(r.mean_psnr(), 3);
        if (!r.mean_psnr() && !r.frames.empty()) psnr = "inf";
        std::snprintf(line, sizeof(line), "%-30s %-20s %7zu %10s %8.4f %10s\n", r.sequence.c_str(),
                      r.config.c_str(), r.frames.size(), psnr.c_str(), r.mean_ssim(),
                      fmt_opt(r.e_star, 4).c_str());
        out << line;
    }
    for (const auto& row : aggregate(reports)) {
        const std::string label = "Cumulative (" + row.rule + ")";
        std::string psnr = fmt_opt(row.psnr, 3);
        if (!row.psnr && row.frames > 0) psnr = "inf";
        std::snprintf(line, sizeof(line), "%-30s %-20s %7zu %10s %8.4f %10s\n", label.c_str(),
                      row.config.c_str(), row.frames, psnr.c_str(), row.ssim,
                      fmt_opt(row.e_star, 4).c_str());
        out << line;
    }
    return out.str();
}

}  // namespace qburst
