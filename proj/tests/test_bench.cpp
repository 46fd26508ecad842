#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qburst/bench.hpp"
#include "qburst/photon_cube.hpp"
#include "qburst/png_io.hpp"
#include "test_util.hpp"

using namespace qburst;
using namespace qburst::bench;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

BenchmarkSpec small_spec(const fs::path& out) {
    BenchmarkSpec spec;
    SyntheticScene scene;
    scene.width = 32;
    scene.height = 32;
    scene.frames = 5;
    scene.motion = SceneMotion::Pan;
    scene.velocity_x = 1.0;
    spec.synthetic = scene;
    spec.window = 3;
    spec.seed = 5;
    spec.out = out;
    NamedMergeConfig naive{"naive", {}};
    naive.config.mode = MergeMode::NaiveAverage;
    naive.config.delta = 1.0;
    NamedMergeConfig adaptive{"adaptive", {}};
    adaptive.config.delta = 1.0;
    spec.merge_configs = {naive, adaptive};
    return spec;
}

void write_sequence(const fs::path& dir, int frames, int w, int h) {
    fs::create_directories(dir);
    for (int i = 0; i < frames; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "f%03d.png", i);
        write_png(dir / name, testutil::random_image(w, h, 3, 100 + i), 8);
    }
}

}  // namespace

TEST_CASE("window count") {
    CHECK(window_count(11, 11) == 1);
    CHECK(window_count(20, 11) == 10);
    CHECK(window_count(10, 11) == 0);
    CHECK(window_count(0, 1) == 0);
    CHECK(window_count(5, 1) == 5);
}

TEST_CASE("default merge configs") {
    const auto d = default_merge_configs();
    REQUIRE(d.size() == 3);
    CHECK(d[0].name == "adaptive_d0.05");
    CHECK(d[0].config.delta == 0.05);
    CHECK(d[2].config.delta == 1.0);
    for (const auto& c : d) CHECK(c.config.mode == MergeMode::Adaptive);
}

TEST_CASE("spec json round trip") {
    auto spec = small_spec("x");
    spec.pattern = {PatternChoice::Kind::Fixed, BayerPattern::GBRG};
    spec.merge_configs[1].config.wiener.noise_variance = 0.25;
    spec.protocol = SamplingProtocol::Realistic1;
    spec.demosaic = DemosaicMethod::MalvarHeCutler;
    const auto j = spec_to_json(spec);
    const auto back = spec_from_json(j);
    CHECK(spec_to_json(back) == j);
    CHECK(back.synthetic->velocity_x == 1.0);
    CHECK(back.merge_configs[1].config.wiener.noise_variance == 0.25);
}

TEST_CASE("spec json rejects bad input") {
    using nlohmann::json;
    CHECK_NOTHROW(spec_from_json(json::object()));
    CHECK(spec_from_json(json::object()).merge_configs.size() == 3);
    CHECK_THROWS_AS(spec_from_json(json{{"windw", 11}}), InvalidArgument);
    CHECK_THROWS_AS(spec_from_json(json{{"window", 4}}), InvalidArgument);
    CHECK_THROWS_AS(spec_from_json(json{{"window", "eleven"}}), InvalidArgument);
    CHECK_THROWS_AS(spec_from_json(json{{"protocol", "Blurry"}}), InvalidArgument);
    CHECK_THROWS_AS(spec_from_json(json{{"pattern", "RGBG"}}), InvalidArgument);
    CHECK_THROWS_AS(spec_from_json(json{{"alpha", 0.0}}), InvalidArgument);
    CHECK_THROWS_AS(spec_from_json(json{{"threads", 0}}), InvalidArgument);
    CHECK_THROWS_AS(spec_from_json(json{{"synthetic", {{"motion", "spin"}}}}), InvalidArgument);
    CHECK_THROWS_AS(spec_from_json(json{{"synthetic", {{"velocity", {1.0}}}}}), InvalidArgument);
    CHECK_THROWS_AS(
        spec_from_json(json{{"merge_configs", {{{"name", "a"}}, {{"name", "a"}}}}}), InvalidArgument);
    CHECK_THROWS_AS(spec_from_json(json{{"merge_configs", {{{"name", "a b"}}}}}), InvalidArgument);
    CHECK_THROWS_AS(spec_from_json(json{{"merge_configs", json::array()}}), InvalidArgument);
    CHECK_THROWS_AS(spec_from_json(json{{"merge_configs", {{{"name", "a"}, {"mode", "Median"}}}}}),
                    InvalidArgument);
    CHECK_THROWS_AS(spec_from_json(json{{"merge_configs", {{{"name", "a"}, {"delta", 2.0}}}}}),
                    InvalidArgument);
}

TEST_CASE("load_spec errors") {
    testutil::TempDir dir("spec");
    CHECK_THROWS_AS(load_spec(dir.path() / "none.json"), InvalidArgument);
    {
        std::ofstream out(dir.path() / "bad.json");
        out << "{ not json";
    }
    CHECK_THROWS_AS(load_spec(dir.path() / "bad.json"), InvalidArgument);
    {
        std::ofstream out(dir.path() / "ok.json");
        out << R"({"window": 5, "seed": 9})";
    }
    const auto spec = load_spec(dir.path() / "ok.json");
    CHECK(spec.window == 5);
    CHECK(spec.seed == 9);
}

TEST_CASE("simulate, reconstruct, evaluate on a small synthetic scene") {
    testutil::TempDir dir("bench");
    const auto spec = small_spec(dir.path());
    const auto sim = run_simulate(spec);
    CHECK(sim.sequences == 1);
    CHECK(sim.nano_bursts == 5);
    CHECK(sim.binary_frames == 35);
    const auto seq = dir.path() / "synthetic";
    CHECK(fs::exists(seq / "nanobursts" / "nb_00004.png"));
    CHECK(fs::exists(seq / "gt" / "gt_00000.png"));
    CHECK(read_cube_file(seq / "cube.pcube").frame_count() == 35);

    CHECK(run_reconstruct(spec).reconstructions == 6);
    CHECK(fs::exists(seq / "recon" / "naive" / "recon_00001.png"));
    CHECK(fs::exists(seq / "recon" / "adaptive" / "recon_00003.png"));
    CHECK(!fs::exists(seq / "recon" / "adaptive" / "recon_00000.png"));

    const auto reports = run_evaluate(spec);
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].frames.size() == 3);
    CHECK(reports[0].frames[0].index == 1);
    CHECK(reports[0].e_star.has_value());
    CHECK(reports[0].config_snapshot["name"] == "naive");
    for (const char* f : {"report.csv", "report.json", "summary.txt", "manifest.json", "recon_manifest.json"})
        CHECK(fs::exists(dir.path() / f));
    CHECK(!fs::exists(dir.path() / "timing.json"));
}

TEST_CASE("runs are reproducible across thread counts") {
    testutil::TempDir a("det_a");
    testutil::TempDir b("det_b");
    auto sa = small_spec(a.path());
    auto sb = small_spec(b.path());
    sa.threads = 1;
    sb.threads = 3;
    for (auto* s : {&sa, &sb}) {
        run_simulate(*s);
        run_reconstruct(*s);
        run_evaluate(*s);
    }
    for (const char* f : {"report.csv", "report.json", "summary.txt", "manifest.json"})
        CHECK(slurp(a.path() / f) == slurp(b.path() / f));
    CHECK(slurp(a.path() / "synthetic" / "cube.pcube") == slurp(b.path() / "synthetic" / "cube.pcube"));
}

TEST_CASE("timing is written beside the reports, never into them") {
    testutil::TempDir dir("timing");
    auto spec = small_spec(dir.path());
    spec.record_timing = true;
    run_simulate(spec);
    run_reconstruct(spec);
    run_evaluate(spec);
    CHECK(fs::exists(dir.path() / "timing.json"));
    CHECK(slurp(dir.path() / "report.csv").find("timing") == std::string::npos);
}

TEST_CASE("corpus of sequences and single images") {
    testutil::TempDir dir("corpus");
    const auto corpus = dir.path() / "corpus";
    write_sequence(corpus / "walk", 4, 20, 18);
    write_sequence(corpus / "empty", 0, 20, 18);
    write_png(corpus / "still.png", testutil::random_image(20, 18, 3, 1), 8);
    BenchmarkSpec spec;
    spec.corpus = corpus;
    spec.out = dir.path() / "out";
    spec.window = 3;
    spec.pattern.kind = PatternChoice::Kind::Random;
    const auto sim = run_simulate(spec);
    CHECK(sim.sequences == 2);
    CHECK(sim.nano_bursts == 5);
    const auto manifest = nlohmann::json::parse(slurp(spec.out / "manifest.json"));
    CHECK(manifest["sequences"][0]["name"] == "still");
    CHECK(manifest["sequences"][1]["name"] == "walk");
    CHECK(manifest["spec"]["pattern"] == "random");
    CHECK(!manifest["spec"].contains("threads"));
    // patterns are drawn from the sequence sub-seed, so reruns agree
    const auto first = manifest["sequences"][1]["pattern"];
    run_simulate(spec);
    CHECK(nlohmann::json::parse(slurp(spec.out / "manifest.json"))["sequences"][1]["pattern"] == first);
}

TEST_CASE("data errors") {
    testutil::TempDir dir("data");
    BenchmarkSpec spec;
    spec.out = dir.path() / "out";

    spec.corpus = dir.path() / "nowhere";
    CHECK_THROWS_AS(run_simulate(spec), DataError);

    fs::create_directories(dir.path() / "empty");
    spec.corpus = dir.path() / "empty";
    CHECK_THROWS_AS(run_simulate(spec), DataError);

    CHECK_THROWS_AS(run_reconstruct(spec), DataError);  // no manifest yet

    write_sequence(dir.path() / "bad" / "seq", 3, 16, 16);
    write_png(dir.path() / "bad" / "seq" / "f999.png", testutil::random_image(8, 8, 3, 1), 8);
    spec.corpus = dir.path() / "bad";
    CHECK_THROWS_AS(run_simulate(spec), DataError);

    fs::remove(dir.path() / "bad" / "seq" / "f999.png");
    spec.protocol = SamplingProtocol::Realistic1;
    CHECK_THROWS_AS(run_simulate(spec), DataError);  // 3 frames, not a multiple of 7
}

TEST_CASE("evaluate detects missing and mismatched outputs") {
    testutil::TempDir dir("missing");
    const auto spec = small_spec(dir.path());
    run_simulate(spec);
    CHECK_THROWS_AS(run_evaluate(spec), DataError);  // no reconstructions yet
    run_reconstruct(spec);
    fs::remove(dir.path() / "synthetic" / "recon" / "naive" / "recon_00002.png");
    CHECK_THROWS_AS(run_evaluate(spec), DataError);

    run_reconstruct(spec);
    CHECK_NOTHROW(run_evaluate(spec));
    auto recon = nlohmann::json::parse(slurp(dir.path() / "recon_manifest.json"));
    recon["sequences"][0]["frames"].erase(0);
    std::ofstream(dir.path() / "recon_manifest.json") << recon.dump();
    try {
        run_evaluate(spec);
        FAIL("expected a count mismatch");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("2 reconstructions but 3 expected") != std::string::npos);
    }
    fs::remove(dir.path() / "synthetic" / "nanobursts" / "nb_00001.png");
    CHECK_THROWS_AS(run_reconstruct(spec), DataError);
}
