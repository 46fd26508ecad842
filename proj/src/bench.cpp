#include "qburst/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>

#include "qburst/metrics.hpp"
#include "qburst/parallel.hpp"
#include "qburst/photon_cube.hpp"
#include "qburst/pipeline.hpp"
#include "qburst/png_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace qburst::bench {

namespace {

constexpr int kManifestVersion = 1;

std::string numbered(const char* prefix, std::size_t index) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%05zu.png", prefix, index);
    return buf;
}

std::string protocol_name(SamplingProtocol p) {
    return p == SamplingProtocol::BlurFree7 ? "BlurFree7" : "Realistic1";
}

SamplingProtocol parse_protocol(const std::string& s) {
    if (s == "BlurFree7") return SamplingProtocol::BlurFree7;
    if (s == "Realistic1") return SamplingProtocol::Realistic1;
    throw InvalidArgument("unknown protocol '" + s + "' (BlurFree7 or Realistic1)");
}

std::string demosaic_name(DemosaicMethod m) {
    return m == DemosaicMethod::Bilinear ? "Bilinear" : "MalvarHeCutler";
}

DemosaicMethod parse_demosaic(const std::string& s) {
    if (s == "Bilinear") return DemosaicMethod::Bilinear;
    if (s == "MalvarHeCutler") return DemosaicMethod::MalvarHeCutler;
    throw InvalidArgument("unknown demosaic method '" + s + "'");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
    if (!j.is_object()) throw InvalidArgument(std::string(where) + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw InvalidArgument("unknown key '" + key + "' in " + where);
        }
    }
}

std::string sanitize(std::string name) {
    for (char& ch : name) {
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_' && ch != '.') {
            ch = '_';
        }
    }
    return name.empty() ? std::string("seq") : name;
}

json read_json(const fs::path& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw DataError(std::string("missing ") + what + ": " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
}

struct SequenceInput {
    std::string name;
    std::vector<SrgbImage> frames;
};

SrgbImage to_channels(const SrgbImage& img, int channels) {
    if (img.pixels.channels() == channels) return img;
    if (channels == 1) return SrgbImage{img.pixels.gray()};
    Image rgb(img.pixels.width(), img.pixels.height(), 3);
    for (int y = 0; y < rgb.height(); ++y) {
        for (int x = 0; x < rgb.width(); ++x) {
            for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = img.pixels.at(x, y);
        }
    }
    return SrgbImage{std::move(rgb)};
}

std::vector<fs::path> sorted_pngs(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".png") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::vector<SrgbImage> read_frames(const std::vector<fs::path>& files) {
    std::vector<SrgbImage> frames;
    for (const auto& f : files) {
        try {
            frames.push_back(read_png(f));
        } catch (const std::exception& e) {
            std::cerr << "warning: skipping unreadable input " << f << ": " << e.what() << '\n';
        }
    }
    return frames;
}

std::vector<SequenceInput> collect_inputs(const BenchmarkSpec& spec) {
    std::vector<SequenceInput> seqs;
    if (spec.corpus) {
        const fs::path& root = *spec.corpus;
        if (fs::is_regular_file(root)) {
            auto frames = read_frames({root});
            if (!frames.empty()) seqs.push_back({sanitize(root.stem().string()), std::move(frames)});
        } else if (fs::is_directory(root)) {
            std::vector<fs::path> entries;
            for (const auto& e : fs::directory_iterator(root)) entries.push_back(e.path());
            std::sort(entries.begin(), entries.end());
            for (const auto& e : entries) {
                if (fs::is_directory(e)) {
                    auto frames = read_frames(sorted_pngs(e));
                    if (frames.empty()) {
                        std::cerr << "warning: no readable frames in " << e << '\n';
                        continue;
                    }
                    seqs.push_back({sanitize(e.filename().string()), std::move(frames)});
                } else if (e.extension() == ".png") {
                    auto frames = read_frames({e});
                    if (!frames.empty()) seqs.push_back({sanitize(e.stem().string()), std::move(frames)});
                }
            }
        } else {
            throw DataError("corpus path does not exist: " + root.string());
        }
    }
    if (spec.synthetic) seqs.push_back({sanitize(spec.synthetic_name), render_scene(*spec.synthetic)});
    if (seqs.empty()) throw DataError("empty corpus: no readable input frames");

    std::set<std::string> names;
    for (auto& s : seqs) {
        while (!names.insert(s.name).second) s.name += "_";
        for (const auto& f : s.frames) {
            if (f.pixels.width() != s.frames.front().pixels.width() ||
                f.pixels.height() != s.frames.front().pixels.height()) {
                throw DataError("sequence '" + s.name + "' mixes frame sizes");
            }
        }
    }
    return seqs;
}

std::optional<BayerPattern> pick_pattern(const PatternChoice& choice, std::uint64_t seq_seed) {
    switch (choice.kind) {
        case PatternChoice::Kind::None: return std::nullopt;
        case PatternChoice::Kind::Fixed: return choice.fixed;
        case PatternChoice::Kind::Random: return kAllBayerPatterns[mix64(seq_seed ^ 0xBA7E5) % 4];
    }
    return std::nullopt;
}

PipelineOptions pipeline_options(const BenchmarkSpec& spec) {
    PipelineOptions opts;
    opts.alpha = spec.alpha;
    opts.dark_rate = spec.dark_rate;
    opts.demosaic = spec.demosaic;
    opts.flow = spec.block_matching;
    opts.validity_factor = spec.validity_factor;
    opts.white_balance = spec.white_balance;
    opts.threads = 1;
    return opts;
}

/// The spec fields that determine results; thread count and paths excluded.
json result_relevant_spec(const BenchmarkSpec& spec) {
    json j = spec_to_json(spec);
    j.erase("threads");
    j.erase("out");
    j.erase("record_timing");
    return j;
}

}  // namespace

void BenchmarkSpec::validate() const {
    if (window < 1 || window % 2 == 0) throw InvalidArgument("window must be odd and >= 1");
    if (merge_configs.empty()) throw InvalidArgument("at least one merge config is required");
    std::set<std::string> names;
    for (const auto& c : merge_configs) {
        if (c.name.empty() || sanitize(c.name) != c.name) {
            throw InvalidArgument("merge config name '" + c.name +
                                  "' must be non-empty and use [A-Za-z0-9._-]");
        }
        if (!names.insert(c.name).second) throw InvalidArgument("duplicate merge config " + c.name);
        c.config.validate();
    }
    if (!(alpha > 0.0)) throw InvalidArgument("alpha must be > 0");
    if (!(dark_rate >= 0.0)) throw InvalidArgument("dark_rate must be >= 0");
    if (block_matching.patch <= 0 || block_matching.radius <= 0 || block_matching.levels <= 0) {
        throw InvalidArgument("block matching parameters must be positive");
    }
    if (threads < 1) throw InvalidArgument("threads must be >= 1");
}

std::vector<NamedMergeConfig> default_merge_configs() {
    std::vector<NamedMergeConfig> out;
    for (double delta : {0.05, 0.5, 1.0}) {
        MergeConfig cfg;
        cfg.mode = MergeMode::Adaptive;
        cfg.delta = delta;
        char name[32];
        std::snprintf(name, sizeof(name), "adaptive_d%g", delta);
        out.push_back({name, cfg});
    }
    return out;
}

std::size_t window_count(std::size_t bursts, int window) noexcept {
    const auto t = static_cast<std::size_t>(window);
    return bursts >= t ? bursts - t + 1 : 0;
}

json merge_config_to_json(const NamedMergeConfig& c) {
    return {{"name", c.name},
            {"mode", std::string(to_string(c.config.mode))},
            {"delta", c.config.delta},
            {"sigma_motion", c.config.sigma_motion},
            {"tau_time", c.config.tau_time},
            {"tile", c.config.wiener.tile},
            {"noise_variance", c.config.wiener.noise_variance ? json(*c.config.wiener.noise_variance)
                                                             : json(nullptr)}};
}

json spec_to_json(const BenchmarkSpec& spec) {
    json j;
    if (spec.corpus) j["corpus"] = spec.corpus->string();
    if (spec.synthetic) {
        const auto& s = *spec.synthetic;
        j["synthetic"] = {{"name", spec.synthetic_name},
                          {"width", s.width},
                          {"height", s.height},
                          {"frames", s.frames},
                          {"color", s.color},
                          {"motion", s.motion == SceneMotion::Pan ? "pan" : "quad"},
                          {"velocity", {s.velocity_x, s.velocity_y}},
                          {"rotation", s.rotation},
                          {"quad_size", s.quad_size},
                          {"feature_scale", s.feature_scale},
                          {"seed", s.seed}};
    }
    j["protocol"] = protocol_name(spec.protocol);
    j["alpha"] = spec.alpha;
    j["dark_rate"] = spec.dark_rate;
    switch (spec.pattern.kind) {
        case PatternChoice::Kind::None: j["pattern"] = "none"; break;
        case PatternChoice::Kind::Random: j["pattern"] = "random"; break;
        case PatternChoice::Kind::Fixed: j["pattern"] = std::string(to_string(spec.pattern.fixed)); break;
    }
    j["fps"] = spec.fps;
    j["window"] = spec.window;
    j["seed"] = spec.seed;
    j["demosaic"] = demosaic_name(spec.demosaic);
    j["white_balance"] = spec.white_balance;
    j["block_matching"] = {{"patch", spec.block_matching.patch},
                           {"radius", spec.block_matching.radius},
                           {"levels", spec.block_matching.levels},
                           {"validity_factor", spec.validity_factor}};
    j["merge_configs"] = json::array();
    for (const auto& c : spec.merge_configs) j["merge_configs"].push_back(merge_config_to_json(c));
    j["out"] = spec.out.string();
    j["threads"] = spec.threads;
    j["record_timing"] = spec.record_timing;
    return j;
}

BenchmarkSpec spec_from_json(const json& j) {
    check_keys(j,
               {"corpus", "synthetic", "protocol", "alpha", "dark_rate", "pattern", "fps", "window",
                "seed", "demosaic", "white_balance", "block_matching", "merge_configs", "out",
                "threads", "record_timing"},
               "benchmark config");
    BenchmarkSpec spec;
    try {
        if (j.contains("corpus")) spec.corpus = j.at("corpus").get<std::string>();
        if (j.contains("synthetic")) {
            const auto& s = j.at("synthetic");
            check_keys(s,
                       {"name", "width", "height", "frames", "color", "motion", "velocity",
                        "rotation", "quad_size", "feature_scale", "seed"},
                       "synthetic");
            SyntheticScene scene;
            spec.synthetic_name = s.value("name", spec.synthetic_name);
            scene.width = s.value("width", scene.width);
            scene.height = s.value("height", scene.height);
            scene.frames = s.value("frames", scene.frames);
            scene.color = s.value("color", scene.color);
            const auto motion = s.value("motion", std::string("pan"));
            if (motion != "pan" && motion != "quad") throw InvalidArgument("motion must be pan or quad");
            scene.motion = motion == "pan" ? SceneMotion::Pan : SceneMotion::Quad;
            if (s.contains("velocity")) {
                const auto v = s.at("velocity").get<std::vector<double>>();
                if (v.size() != 2) throw InvalidArgument("velocity must be [vx, vy]");
                scene.velocity_x = v[0];
                scene.velocity_y = v[1];
            }
            scene.rotation = s.value("rotation", scene.rotation);
            scene.quad_size = s.value("quad_size", scene.quad_size);
            scene.feature_scale = s.value("feature_scale", scene.feature_scale);
            scene.seed = s.value("seed", scene.seed);
            spec.synthetic = scene;
        }
        if (j.contains("protocol")) spec.protocol = parse_protocol(j.at("protocol").get<std::string>());
        spec.alpha = j.value("alpha", spec.alpha);
        spec.dark_rate = j.value("dark_rate", spec.dark_rate);
        if (j.contains("pattern")) {
            const auto p = j.at("pattern").get<std::string>();
            if (p == "none") {
                spec.pattern.kind = PatternChoice::Kind::None;
            } else if (p == "random") {
                spec.pattern.kind = PatternChoice::Kind::Random;
            } else if (const auto fixed = parse_bayer(p)) {
                spec.pattern = {PatternChoice::Kind::Fixed, *fixed};
            } else {
                throw InvalidArgument("unknown pattern '" + p + "'");
            }
        }
        spec.fps = j.value("fps", spec.fps);
        spec.window = j.value("window", spec.window);
        spec.seed = j.value("seed", spec.seed);
        if (j.contains("demosaic")) spec.demosaic = parse_demosaic(j.at("demosaic").get<std::string>());
        spec.white_balance = j.value("white_balance", spec.white_balance);
        if (j.contains("block_matching")) {
            const auto& b = j.at("block_matching");
            check_keys(b, {"patch", "radius", "levels", "validity_factor"}, "block_matching");
            spec.block_matching.patch = b.value("patch", spec.block_matching.patch);
            spec.block_matching.radius = b.value("radius", spec.block_matching.radius);
            spec.block_matching.levels = b.value("levels", spec.block_matching.levels);
            spec.validity_factor = b.value("validity_factor", spec.validity_factor);
        }
        if (j.contains("merge_configs")) {
            spec.merge_configs.clear();
            for (const auto& m : j.at("merge_configs")) {
                check_keys(m, {"name", "mode", "delta", "sigma_motion", "tau_time", "tile", "noise_variance"},
                           "merge config");
                NamedMergeConfig c;
                c.name = m.at("name").get<std::string>();
                if (m.contains("mode")) {
                    const auto mode = parse_merge_mode(m.at("mode").get<std::string>());
                    if (!mode) throw InvalidArgument("unknown merge mode in config " + c.name);
                    c.config.mode = *mode;
                }
                c.config.delta = m.value("delta", c.config.delta);
                c.config.sigma_motion = m.value("sigma_motion", c.config.sigma_motion);
                c.config.tau_time = m.value("tau_time", c.config.tau_time);
                c.config.wiener.tile = m.value("tile", c.config.wiener.tile);
                if (m.contains("noise_variance") && !m.at("noise_variance").is_null()) {
                    c.config.wiener.noise_variance = m.at("noise_variance").get<double>();
                }
                spec.merge_configs.push_back(c);
            }
        }
        if (j.contains("out")) spec.out = j.at("out").get<std::string>();
        spec.threads = j.value("threads", spec.threads);
        spec.record_timing = j.value("record_timing", spec.record_timing);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed benchmark config: ") + e.what());
    }
    spec.validate();
    return spec;
}

BenchmarkSpec load_spec(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidArgument(path.string() + ": " + e.what());
    }
    return spec_from_json(j);
}

SimulateResult run_simulate(const BenchmarkSpec& spec) {
    spec.validate();
    auto inputs = collect_inputs(spec);
    fs::create_directories(spec.out);

    std::vector<json> entries(inputs.size());
    std::vector<SimulateResult> partial(inputs.size());
    parallel_for(inputs.size(), spec.threads, [&](std::size_t s) {
        auto& in = inputs[s];
        const std::uint64_t seq_seed = derive_seed(spec.seed, "sequence/" + in.name);
        const auto pattern = pick_pattern(spec.pattern, seq_seed);
        for (auto& f : in.frames) f = to_channels(f, pattern ? 3 : 1);

        SimulationParams params;
        params.protocol = spec.protocol;
        params.alpha = spec.alpha;
        params.dark_rate = spec.dark_rate;
        params.fps = spec.fps;
        params.pattern = pattern;
        params.rng = RngSpec{seq_seed};
        SimulatedSequence seq;
        try {
            seq = simulate_burst_sequence(in.frames, params);
        } catch (const InvalidArgument& e) {
            throw DataError("sequence '" + in.name + "': " + e.what());
        }

        const fs::path dir = spec.out / in.name;
        fs::create_directories(dir / "nanobursts");
        fs::create_directories(dir / "gt");
        write_cube_file(to_photon_cube(seq, params), dir / "cube.pcube");

        json nb_paths = json::array();
        json gt_paths = json::array();
        for (std::size_t j = 0; j < seq.bursts.size(); ++j) {
            const auto nb_rel = fs::path(in.name) / "nanobursts" / numbered("nb", j);
            const auto gt_rel = fs::path(in.name) / "gt" / numbered("gt", j);
            write_nano_burst_png(spec.out / nb_rel, seq.bursts[j]);
            write_png(spec.out / gt_rel, in.frames[seq.gt_index[j]].pixels, 16);
            nb_paths.push_back(nb_rel.generic_string());
            gt_paths.push_back(gt_rel.generic_string());
        }
        entries[s] = {{"name", in.name},
                      {"pattern", pattern ? json(std::string(to_string(*pattern))) : json(nullptr)},
                      {"width", in.frames.front().pixels.width()},
                      {"height", in.frames.front().pixels.height()},
                      {"n_frames", kNanoBurstFrames},
                      {"seed", seq_seed},
                      {"expected_ppp", seq.expected_ppp},
                      {"gt_frames", in.frames.size()},
                      {"binary_frames", seq.frames.size()},
                      {"cube", (fs::path(in.name) / "cube.pcube").generic_string()},
                      {"nano_bursts", nb_paths},
                      {"gt", gt_paths},
                      {"gt_index", seq.gt_index}};
        partial[s] = {1, seq.bursts.size(), seq.frames.size()};
    });

    json manifest;
    manifest["schema_version"] = kManifestVersion;
    manifest["spec"] = result_relevant_spec(spec);
    manifest["sequences"] = entries;
    write_text(spec.out / "manifest.json", manifest.dump(2) + "\n");

    SimulateResult total;
    for (const auto& p : partial) {
        total.sequences += p.sequences;
        total.nano_bursts += p.nano_bursts;
        total.binary_frames += p.binary_frames;
    }
    return total;
}

ReconstructResult run_reconstruct(const BenchmarkSpec& spec) {
    spec.validate();
    const json manifest = read_json(spec.out / "manifest.json", "simulation manifest");

    struct Task {
        std::size_t seq;
        std::size_t config;
        std::size_t start;
    };
    struct SeqData {
        std::string name;
        std::vector<NanoBurst> bursts;
    };
    std::vector<SeqData> seqs;
    std::vector<Task> tasks;
    for (const auto& entry : manifest.at("sequences")) {
        SeqData sd;
        sd.name = entry.at("name").get<std::string>();
        const auto pattern = entry.at("pattern").is_null()
                                 ? std::nullopt
                                 : parse_bayer(entry.at("pattern").get<std::string>());
        const int n = entry.at("n_frames").get<int>();
        for (const auto& rel : entry.at("nano_bursts")) {
            const fs::path path = spec.out / rel.get<std::string>();
            if (!fs::exists(path)) {
                throw DataError("missing manifest entry " + sd.name + "/nano_bursts: " + path.string());
            }
            try {
                sd.bursts.push_back(read_nano_burst_png(path, n, pattern));
            } catch (const std::exception& e) {
                throw DataError(e.what());
            }
        }
        const std::size_t windows = window_count(sd.bursts.size(), spec.window);
        for (std::size_t c = 0; c < spec.merge_configs.size(); ++c) {
            fs::create_directories(spec.out / sd.name / "recon" / spec.merge_configs[c].name);
            for (std::size_t s = 0; s < windows; ++s) tasks.push_back({seqs.size(), c, s});
        }
        seqs.push_back(std::move(sd));
    }

    const auto opts = pipeline_options(spec);
    const auto half = static_cast<std::size_t>(spec.window / 2);
    std::vector<double> elapsed(tasks.size(), 0.0);
    parallel_for(tasks.size(), spec.threads, [&](std::size_t i) {
        const auto& task = tasks[i];
        const auto& sd = seqs[task.seq];
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<NanoBurst> frames(sd.bursts.begin() + static_cast<std::ptrdiff_t>(task.start),
                                      sd.bursts.begin() + static_cast<std::ptrdiff_t>(task.start + spec.window));
        const auto out = reconstruct(BurstWindow(std::move(frames)), spec.merge_configs[task.config].config, opts);
        write_png(spec.out / sd.name / "recon" / spec.merge_configs[task.config].name /
                      numbered("recon", task.start + half),
                  out.pixels, 16);
        elapsed[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    });

    json recon;
    recon["schema_version"] = kManifestVersion;
    recon["window"] = spec.window;
    recon["configs"] = json::array();
    for (const auto& c : spec.merge_configs) recon["configs"].push_back(merge_config_to_json(c));
    recon["sequences"] = json::array();
    json timing = json::array();
    for (std::size_t s = 0; s < seqs.size(); ++s) {
        for (std::size_t c = 0; c < spec.merge_configs.size(); ++c) {
            json frames = json::array();
            double ms = 0.0;
            for (std::size_t i = 0; i < tasks.size(); ++i) {
                if (tasks[i].seq != s || tasks[i].config != c) continue;
                const auto center = tasks[i].start + half;
                frames.push_back({{"index", center},
                                  {"path", (fs::path(seqs[s].name) / "recon" /
                                            spec.merge_configs[c].name / numbered("recon", center))
                                               .generic_string()}});
                ms += elapsed[i];
            }
            recon["sequences"].push_back(
                {{"name", seqs[s].name}, {"config", spec.merge_configs[c].name}, {"frames", frames}});
            timing.push_back({{"name", seqs[s].name}, {"config", spec.merge_configs[c].name}, {"ms", ms}});
        }
    }
    write_text(spec.out / "recon_manifest.json", recon.dump(2) + "\n");
    if (spec.record_timing) write_text(spec.out / "timing.json", timing.dump(2) + "\n");
    return {tasks.size()};
}

std::vector<ReconReport> run_evaluate(const BenchmarkSpec& spec) {
    spec.validate();
    const json manifest = read_json(spec.out / "manifest.json", "simulation manifest");
    const json recon = read_json(spec.out / "recon_manifest.json", "reconstruction manifest");
    std::optional<json> timing;
    if (spec.record_timing && fs::exists(spec.out / "timing.json")) {
        timing = read_json(spec.out / "timing.json", "timing");
    }
    const int window = recon.at("window").get<int>();

    std::vector<const json*> seq_entries;
    for (const auto& e : manifest.at("sequences")) seq_entries.push_back(&e);
    auto find_seq = [&](const std::string& name) -> const json& {
        for (const auto* e : seq_entries) {
            if (e->at("name") == name) return *e;
        }
        throw DataError("reconstruction references unknown sequence " + name);
    };
    std::vector<const json*> jobs;
    for (const auto& e : recon.at("sequences")) jobs.push_back(&e);

    std::vector<ReconReport> reports(jobs.size());
    parallel_for(jobs.size(), spec.threads, [&](std::size_t k) {
        const json& job = *jobs[k];
        const std::string name = job.at("name").get<std::string>();
        const std::string config = job.at("config").get<std::string>();
        const json& seq = find_seq(name);
        const auto& gt_paths = seq.at("gt");
        const auto& gt_index = seq.at("gt_index");
        const auto& frames = job.at("frames");
        const std::size_t expected = window_count(seq.at("nano_bursts").size(), window);
        if (frames.size() != expected) {
            throw DataError("sequence " + name + ", config " + config + ": " +
                            std::to_string(frames.size()) + " reconstructions but " +
                            std::to_string(expected) + " expected from the GT/nano-burst count");
        }

        ReconReport report;
        report.sequence = name;
        report.config = config;
        for (const auto& c : recon.at("configs")) {
            if (c.at("name") == config) report.config_snapshot = c;
        }
        std::vector<Image> recon_images;
        std::vector<Image> gt_images;
        for (const auto& f : frames) {
            const auto index = f.at("index").get<std::size_t>();
            if (index >= gt_paths.size()) {
                throw DataError("no GT frame for reconstruction " + std::to_string(index) + " of " + name);
            }
            const fs::path recon_path = spec.out / f.at("path").get<std::string>();
            const fs::path gt_path = spec.out / gt_paths[index].get<std::string>();
            for (const auto& p : {recon_path, gt_path}) {
                if (!fs::exists(p)) throw DataError("missing file " + p.string());
            }
            auto r = read_png(recon_path).pixels;
            auto g = read_png(gt_path).pixels;
            if (!r.same_shape(g)) throw DataError("GT/recon shape mismatch for " + recon_path.string());
            const auto p = psnr(r, g, 1.0);
            FrameMetrics m;
            m.index = index;
            m.gt_index = gt_index[index].get<std::size_t>();
            m.psnr = p.db;
            m.psnr_infinite = p.infinite;
            m.ssim = ssim(r, g);
            report.frames.push_back(m);
            recon_images.push_back(std::move(r));
            gt_images.push_back(std::move(g));
        }
        const auto& bm = spec.block_matching;
        if (recon_images.size() >= 2 && recon_images.front().width() >= bm.patch &&
            recon_images.front().height() >= bm.patch) {
            std::vector<FlowField> flows;
            BlockMatchParams params = bm;
            params.max_sad_at_level = nullptr;
            params.max_sad = std::numeric_limits<double>::infinity();
            for (std::size_t t = 0; t + 1 < gt_images.size(); ++t) {
                flows.push_back(block_match_flow(gt_images[t], gt_images[t + 1], params));
            }
            const auto we = warping_error(recon_images, flows);
            if (we.valid_pixels > 0) report.e_star = we.e_star;
            report.e_star_valid_pixels = we.valid_pixels;
        }
        if (timing) {
            for (const auto& t : *timing) {
                if (t.at("name") == name && t.at("config") == config) report.timing_ms = t.at("ms").get<double>();
            }
        }
        reports[k] = std::move(report);
    });

    write_text(spec.out / "report.csv", reports_to_csv(reports));
    write_text(spec.out / "report.json", reports_to_json(reports, spec.record_timing).dump(2) + "\n");
    write_text(spec.out / "summary.txt", summary_table(reports));
    return reports;
}

}  // namespace qburst::bench
