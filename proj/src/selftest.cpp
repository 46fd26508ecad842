#include <cmath>
#include <sstream>

#include "qburst/bench.hpp"
#include "qburst/photon_cube.hpp"
#include "qburst/synthetic.hpp"

namespace qburst::bench {

namespace {

CheckResult sampler_calibration(const SelftestOptions& opt) {
    constexpr int kSide = 1000;  // 10^6 draws per rate
    CheckResult r{"sampler_calibration", true, ""};
    std::ostringstream detail;
    std::uint64_t frame = 0;
    for (double lambda : {0.1, 1.0, 3.0}) {
        const double sampled = opt.inject_wrong_p ? lambda * 1.1 : lambda;
        PhotonRateMap rate{Image(kSide, kSide, 1, sampled), 1.0, 0.0};
        const auto f = sample_binary_frame(rate, RngSpec{opt.seed}, frame++, std::nullopt, opt.threads);
        double hits = 0.0;
        for (auto b : f.bits) hits += b;
        const double m = static_cast<double>(f.bits.size());
        const double p = detection_probability(lambda);
        const double observed = hits / m;
        const double bound = 4.0 * std::sqrt(p * (1.0 - p) / m);
        const bool ok = std::abs(observed - p) <= bound;
        r.passed = r.passed && ok;
        detail << "lambda=" << lambda << " observed=" << observed << " expected=" << p
               << " bound=" << bound << (ok ? "" : " FAIL") << "; ";
    }
    r.detail = detail.str();
    return r;
}

CheckResult inversion_consistency(const SelftestOptions& opt) {
    constexpr double kLambda = 0.5;
    PhotonRateMap rate{Image(64, 64, 1, kLambda), 1.0, 0.0};
    const auto nb = make_nano_burst(rate, 1000, std::nullopt, RngSpec{opt.seed ^ 0x1F}, 0, opt.threads);
    const auto lin = mle_invert(nb, 1.0);
    double sum = 0.0;
    for (double v : lin.pixels.data()) sum += v;
    const double mean = sum / static_cast<double>(lin.pixels.size());
    const double rel = std::abs(mean - kLambda) / kLambda;
    std::ostringstream detail;
    detail << "mean lambda_hat=" << mean << " expected=" << kLambda << " rel_err=" << rel
           << " tolerance=0.02";
    return {"inversion_consistency", rel <= 0.02, detail.str()};
}

CheckResult flow_exactness(const SelftestOptions& opt) {
    constexpr int kSize = 64;
    constexpr int kRadius = 8;
    BlockMatchParams params;
    const std::uint64_t seed = opt.seed + 3;
    Image ref(kSize, kSize, 1);
    for (int y = 0; y < kSize; ++y) {
        for (int x = 0; x < kSize; ++x) ref.at(x, y) = value_noise(x, y, 6.0, seed);
    }
    int failures = 0;
    std::ostringstream detail;
    for (int sy = -kRadius; sy <= kRadius; ++sy) {
        for (int sx = -kRadius; sx <= kRadius; ++sx) {
            Image src(kSize, kSize, 1);
            for (int y = 0; y < kSize; ++y) {
                for (int x = 0; x < kSize; ++x) src.at(x, y) = value_noise(x - sx, y - sy, 6.0, seed);
            }
            const auto flow = block_match_flow(src, ref, params);
            // Interior: patches whose match lies wholly inside the reference.
            for (int ty = 0; ty < kSize / params.patch; ++ty) {
                for (int tx = 0; tx < kSize / params.patch; ++tx) {
                    const int x0 = tx * params.patch - sx;
                    const int y0 = ty * params.patch - sy;
                    if (x0 < 0 || y0 < 0 || x0 + params.patch > kSize || y0 + params.patch > kSize) continue;
                    const int px = tx * params.patch;
                    const int py = ty * params.patch;
                    if (flow.dx(px, py) != -sx || flow.dy(px, py) != -sy) {
                        if (failures++ < 3) {
                            detail << "shift (" << sx << "," << sy << ") patch (" << tx << "," << ty
                                   << ") got (" << flow.dx(px, py) << "," << flow.dy(px, py) << "); ";
                        }
                    }
                }
            }
        }
    }
    detail << failures << " mismatched interior patches over 289 shifts";
    return {"flow_exactness", failures == 0, detail.str()};
}

CheckResult cube_round_trip(const SelftestOptions& opt) {
    const RngSpec rng{opt.seed ^ 0xC0BE};
    auto draw = [&](std::uint64_t i, std::uint64_t k) {
        return rng.uniform(i, k, 0, RngStream::Selftest);
    };
    int failures = 0;
    std::ostringstream detail;
    for (std::uint64_t i = 0; i < 200; ++i) {
        CubeHeader h;
        h.width = 1 + static_cast<std::uint32_t>(draw(i, 0) * 64);
        h.height = 1 + static_cast<std::uint32_t>(draw(i, 1) * 64);
        const auto frames = static_cast<std::uint64_t>(draw(i, 2) * 101);
        if (draw(i, 3) < 0.5) {
            h.channels = 3;
            h.pattern = kAllBayerPatterns[static_cast<std::size_t>(draw(i, 4) * 4)];
        }
        h.fps = 1000.0 * draw(i, 5);
        h.alpha = 4.0 * draw(i, 6);
        h.seed = static_cast<std::uint64_t>(draw(i, 7) * 1e15);
        PhotonCube cube(h);
        for (std::uint64_t f = 0; f < frames; ++f) {
            BinaryFrame bf{static_cast<int>(h.width), static_cast<int>(h.height),
                           std::vector<std::uint8_t>(static_cast<std::size_t>(h.width) * h.height), h.pattern};
            for (std::size_t p = 0; p < bf.bits.size(); ++p) {
                bf.bits[p] = rng.uniform(i * 1000 + f, p, 1, RngStream::Selftest) < 0.5;
            }
            cube.append(bf);
        }
        std::stringstream buf;
        write_cube(cube, buf);
        std::string bytes = buf.str();
        if (opt.inject_bitflip && cube.payload().size() > 0) {
            bytes[kCubeHeaderSize] = static_cast<char>(bytes[kCubeHeaderSize] ^ 0x01);
        }
        std::stringstream in(bytes);
        const auto back = read_cube(in);
        std::stringstream again;
        write_cube(back, again);
        if (!(back == cube) || again.str() != buf.str()) {
            if (failures++ < 3) {
                detail << "cube " << i << " (" << h.width << "x" << h.height << "x" << frames
                       << ") differs after round trip; ";
            }
        }
    }
    detail << failures << " of 200 cubes failed";
    return {"cube_round_trip", failures == 0, detail.str()};
}

}  // namespace

std::vector<CheckResult> run_selftest(const SelftestOptions& options) {
    return {sampler_calibration(options), inversion_consistency(options), flow_exactness(options),
            cube_round_trip(options)};
}

}  // namespace qburst::bench
