#include "qburst/quanta_sim.hpp"

#include <cmath>
#include <sstream>

#include "qburst/parallel.hpp"
#include "qburst/photon_cube.hpp"

namespace qburst {

namespace {

void require_finite(const Image& img, const char* what) {
    const auto data = img.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!std::isfinite(data[i])) {
            std::ostringstream msg;
            msg << what << ": non-finite value " << data[i] << " at element " << i;
            throw InvalidArgument(msg.str());
        }
    }
}

void check_pattern(const Image& lambda, std::optional<BayerPattern> pattern) {
    if (lambda.channels() == 3 && !pattern) {
        throw InvalidArgument("3-channel rate map needs a Bayer pattern");
    }
    if (lambda.channels() == 1 && pattern) {
        throw InvalidArgument("mosaic is undefined for a monochrome rate map");
    }
    if (lambda.channels() != 1 && lambda.channels() != 3) {
        throw InvalidArgument("rate map must have 1 or 3 channels");
    }
}

}  // namespace

Image NanoBurst::to_image() const {
    Image out(width, height, 1);
    auto data = out.data();
    for (std::size_t i = 0; i < counts.size(); ++i) {
        data[i] = static_cast<double>(counts[i]) / n_frames;
    }
    return out;
}

double NanoBurst::bit_depth() const noexcept { return std::log2(n_frames + 1.0); }

LinearImage gamma_linearize(const SrgbImage& img, double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw InvalidArgument("gamma must be positive and finite");
    }
    require_finite(img.pixels, "gamma_linearize");
    LinearImage out{img.pixels, gamma};
    for (double& v : out.pixels.data()) {
        if (v < 0.0 || v > 1.0) throw InvalidArgument("gamma_linearize: value outside [0,1]");
        v = std::pow(v, gamma);
    }
    return out;
}

PhotonRateMap make_rate_map(const LinearImage& lin, double alpha, double dark_rate) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be >= 0");
    if (!(dark_rate >= 0.0) || !std::isfinite(dark_rate)) {
        throw InvalidArgument("dark_rate must be >= 0");
    }
    require_finite(lin.pixels, "make_rate_map");
    PhotonRateMap rate{lin.pixels, alpha, dark_rate};
    for (double& v : rate.lambda.data()) {
        if (v < 0.0) throw InvalidArgument("make_rate_map: negative linear intensity");
        v = alpha * v + dark_rate;
    }
    return rate;
}

double expected_ppp(const PhotonRateMap& rate) {
    if (rate.lambda.empty()) throw InvalidArgument("expected_ppp: empty rate map");
    double sum = 0.0;
    for (double v : rate.lambda.data()) sum += v;
    return sum / static_cast<double>(rate.lambda.size());
}

double detection_probability(double lambda) noexcept { return -std::expm1(-lambda); }

BinaryFrame sample_binary_frame(const PhotonRateMap& rate, const RngSpec& rng,
                                std::uint64_t frame_index, std::optional<BayerPattern> pattern,
                                int threads) {
    const Image& lambda = rate.lambda;
    check_pattern(lambda, pattern);
    BinaryFrame frame{lambda.width(), lambda.height(),
                      std::vector<std::uint8_t>(lambda.pixel_count()), pattern};
    const int w = lambda.width();
    parallel_for(static_cast<std::size_t>(lambda.height()), threads, [&](std::size_t row) {
        const int y = static_cast<int>(row);
        for (int x = 0; x < w; ++x) {
            const int c = pattern ? cfa_channel(*pattern, x, y) : 0;
            const std::uint64_t pixel = static_cast<std::uint64_t>(y) * w + x;
            const double p = detection_probability(lambda.at(x, y, c));
            frame.bits[pixel] = rng.uniform(frame_index, pixel, c) < p ? 1 : 0;
        }
    });
    return frame;
}

Image mosaic(const Image& img, BayerPattern pattern) {
    if (img.channels() != 3) throw InvalidArgument("mosaic needs a 3-channel image");
    Image out(img.width(), img.height(), 1);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) out.at(x, y) = img.at(x, y, cfa_channel(pattern, x, y));
    }
    return out;
}

NanoBurst accumulate_frames(std::span<const BinaryFrame> frames) {
    if (frames.empty()) throw InvalidArgument("nano-burst needs at least one binary frame");
    if (frames.size() > 0xFFFF) throw InvalidArgument("nano-burst frame count exceeds 65535");
    const auto& first = frames.front();
    NanoBurst nb{first.width, first.height, static_cast<int>(frames.size()),
                 std::vector<std::uint16_t>(first.bits.size(), 0), first.pattern};
    for (const auto& f : frames) {
        if (f.width != first.width || f.height != first.height || f.pattern != first.pattern) {
            throw InvalidArgument("binary frames of one nano-burst must share dims and pattern");
        }
        for (std::size_t i = 0; i < f.bits.size(); ++i) nb.counts[i] += f.bits[i];
    }
    return nb;
}

NanoBurst make_nano_burst(const PhotonRateMap& rate, int n, std::optional<BayerPattern> pattern,
                          const RngSpec& rng, std::uint64_t first_frame, int threads) {
    if (n < 1) throw InvalidArgument("nano-burst size must be >= 1");
    std::vector<BinaryFrame> frames;
    frames.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        frames.push_back(sample_binary_frame(rate, rng, first_frame + i, pattern, threads));
    }
    return accumulate_frames(frames);
}

SimulatedSequence simulate_burst_sequence(std::span<const SrgbImage> gt,
                                          const SimulationParams& params) {
    constexpr int n = kNanoBurstFrames;
    if (params.protocol == SamplingProtocol::Realistic1 && gt.size() % n != 0) {
        throw InvalidArgument("Realistic1 needs a frame count divisible by 7, got " +
                              std::to_string(gt.size()));
    }
    SimulatedSequence seq;
    double ppp_sum = 0.0;
    std::vector<PhotonRateMap> rates;
    rates.reserve(gt.size());
    for (const auto& img : gt) {
        if (params.pattern && img.pixels.channels() != 3) {
            throw InvalidArgument("color simulation needs 3-channel GT frames");
        }
        if (!gt.empty() && !img.pixels.same_shape(gt.front().pixels)) {
            throw InvalidArgument("GT frames of one sequence must share dims");
        }
        rates.push_back(
            make_rate_map(gamma_linearize(img, params.gamma), params.alpha, params.dark_rate));
        ppp_sum += expected_ppp(rates.back());
    }
    seq.expected_ppp = gt.empty() ? 0.0 : ppp_sum / static_cast<double>(gt.size());

    std::uint64_t frame_index = 0;
    if (params.protocol == SamplingProtocol::BlurFree7) {
        for (std::size_t g = 0; g < rates.size(); ++g) {
            const auto first = seq.frames.size();
            for (int i = 0; i < n; ++i) {
                seq.frames.push_back(sample_binary_frame(rates[g], params.rng, frame_index++,
                                                         params.pattern, params.threads));
            }
            seq.bursts.push_back(
                accumulate_frames(std::span(seq.frames).subspan(first, n)));
            seq.gt_index.push_back(g);
        }
    } else {
        for (const auto& rate : rates) {
            seq.frames.push_back(
                sample_binary_frame(rate, params.rng, frame_index++, params.pattern, params.threads));
        }
        for (std::size_t first = 0; first < seq.frames.size(); first += n) {
            seq.bursts.push_back(accumulate_frames(std::span(seq.frames).subspan(first, n)));
            seq.gt_index.push_back(first + n / 2);
        }
    }
    return seq;
}

PhotonCube to_photon_cube(const SimulatedSequence& seq, const SimulationParams& params) {
    CubeHeader header;
    if (!seq.frames.empty()) {
        header.width = static_cast<std::uint32_t>(seq.frames.front().width);
        header.height = static_cast<std::uint32_t>(seq.frames.front().height);
    }
    header.fps = params.fps;
    header.channels = params.pattern ? 3 : 1;
    header.pattern = params.pattern;
    header.alpha = params.alpha;
    header.seed = params.rng.seed;
    PhotonCube cube(header);
    for (const auto& f : seq.frames) cube.append(f);
    return cube;
}

}  // namespace qburst
