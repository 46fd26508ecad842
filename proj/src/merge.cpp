#include "qburst/merge.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

namespace qburst {

std::string_view to_string(MergeMode mode) noexcept {
    switch (mode) {
        case MergeMode::NaiveAverage: return "NaiveAverage";
        case MergeMode::Adaptive: return "Adaptive";
        case MergeMode::Wiener: return "Wiener";
    }
    return "?";
}

std::optional<MergeMode> parse_merge_mode(std::string_view name) noexcept {
    for (auto m : {MergeMode::NaiveAverage, MergeMode::Adaptive, MergeMode::Wiener}) {
        if (to_string(m) == name) return m;
    }
    return std::nullopt;
}

void MergeConfig::validate() const {
    if (!(delta >= 0.0 && delta <= 1.0)) throw InvalidArgument("delta must lie in [0, 1]");
    if (!(sigma_motion > 0.0)) throw InvalidArgument("sigma_motion must be > 0");
    if (!(tau_time > 0.0)) throw InvalidArgument("tau_time must be > 0");
    const int t = wiener.tile;
    if (t <= 1 || (t & (t - 1)) != 0) throw InvalidArgument("wiener tile must be a power of two");
    if (wiener.noise_variance && !(*wiener.noise_variance >= 0.0)) {
        throw InvalidArgument("noise_variance must be >= 0");
    }
}

double mle_lambda(int detections, int n_frames) noexcept {
    const double s = detections >= n_frames ? n_frames - 0.5 : static_cast<double>(detections);
    return -std::log1p(-s / n_frames);
}

LinearImage mle_invert(const NanoBurst& nb, double alpha, double dark_rate) {
    if (!(alpha > 0.0)) throw InvalidArgument("mle_invert: alpha must be > 0");
    if (nb.n_frames < 1) throw InvalidArgument("mle_invert: nano-burst without frames");
    // One lookup per possible count.
    std::vector<double> table(static_cast<std::size_t>(nb.n_frames) + 1);
    for (int k = 0; k <= nb.n_frames; ++k) {
        table[k] = std::max(0.0, mle_lambda(k, nb.n_frames) - dark_rate) / alpha;
    }
    LinearImage out{Image(nb.width, nb.height, 1)};
    auto data = out.pixels.data();
    for (std::size_t i = 0; i < nb.counts.size(); ++i) {
        if (nb.counts[i] > nb.n_frames) throw InvalidArgument("mle_invert: count exceeds n_frames");
        data[i] = table[nb.counts[i]];
    }
    return out;
}

double bernoulli_noise_variance(double level, int n_frames, double alpha) noexcept {
    // Delta method on lambda = -ln(1 - p): var = p / ((1 - p) N) = (e^lambda - 1) / N.
    const double lambda = std::max(0.0, alpha * level);
    return std::expm1(lambda) / (n_frames * alpha * alpha);
}

void adaptive_weights(std::span<const double> flow_mag2, std::span<const std::uint8_t> valid,
                      const MergeConfig& cfg, std::span<double> weights) {
    const std::size_t n = flow_mag2.size();
    const auto center = static_cast<double>(n / 2);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!valid[i]) {
            weights[i] = 0.0;
            continue;
        }
        const double motion = std::exp(-flow_mag2[i] / (2.0 * cfg.sigma_motion * cfg.sigma_motion));
        const double time = std::exp(-std::abs(static_cast<double>(i) - center) / cfg.tau_time);
        weights[i] = motion * time;
        total += weights[i];
    }
    if (total > 0.0) {
        for (std::size_t i = 0; i < n; ++i) weights[i] /= total;
    }
}

namespace {

void check_burst(std::span<const Image> frames, std::span<const FlowField> flows) {
    if (frames.empty() || frames.size() % 2 == 0) {
        throw InvalidArgument("burst must hold an odd number of frames");
    }
    if (flows.size() != frames.size()) throw InvalidArgument("one flow per frame is required");
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (!frames[i].same_shape(frames.front())) {
            throw InvalidArgument("burst frames must share shape");
        }
        if (flows[i].width() != frames[i].width() || flows[i].height() != frames[i].height()) {
            throw InvalidArgument("flow dims differ from frame dims");
        }
    }
}

std::vector<WarpResult> warp_all(std::span<const Image> frames, std::span<const FlowField> flows) {
    const std::size_t c = frames.size() / 2;
    std::vector<WarpResult> out;
    out.reserve(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (i == c) {
            out.push_back({frames[i], std::vector<std::uint8_t>(frames[i].pixel_count(), 1)});
        } else {
            out.push_back(warp(frames[i], flows[i]));
        }
    }
    return out;
}

struct FftwFree {
    void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

FftwBuffer make_buffer(std::size_t n) {
    return FftwBuffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

class Fft2d {
public:
    explicit Fft2d(int n) : n_(n), in_(make_buffer(n * n)), out_(make_buffer(n * n)) {
        std::lock_guard lock(fftw_planner_mutex());
        forward_ = fftw_plan_dft_2d(n, n, in_.get(), out_.get(), FFTW_FORWARD, FFTW_ESTIMATE);
        inverse_ = fftw_plan_dft_2d(n, n, in_.get(), out_.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Fft2d() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(inverse_);
    }
    Fft2d(const Fft2d&) = delete;
    Fft2d& operator=(const Fft2d&) = delete;

    /// Forward transform of real data into `spectrum` (n*n entries).
    void forward(const std::vector<double>& data, std::vector<std::complex<double>>& spectrum) {
        for (int i = 0; i < n_ * n_; ++i) {
            in_[i][0] = data[i];
            in_[i][1] = 0.0;
        }
        fftw_execute_dft(forward_, in_.get(), out_.get());
        for (int i = 0; i < n_ * n_; ++i) spectrum[i] = {out_[i][0], out_[i][1]};
    }

    /// Real part of the normalized inverse transform.
    void inverse(const std::vector<std::complex<double>>& spectrum, std::vector<double>& data) {
        for (int i = 0; i < n_ * n_; ++i) {
            in_[i][0] = spectrum[i].real();
            in_[i][1] = spectrum[i].imag();
        }
        fftw_execute_dft(inverse_, in_.get(), out_.get());
        const double scale = 1.0 / (n_ * n_);
        for (int i = 0; i < n_ * n_; ++i) data[i] = out_[i][0] * scale;
    }

private:
    int n_;
    FftwBuffer in_;
    FftwBuffer out_;
    fftw_plan forward_ = nullptr;
    fftw_plan inverse_ = nullptr;
};

}  // namespace

Image wiener_merge(std::span<const Image> frames, std::span<const FlowField> flows,
                   const WienerParams& params) {
    check_burst(frames, flows);
    const int n = params.tile;
    if (n <= 1 || (n & (n - 1)) != 0) throw InvalidArgument("wiener tile must be a power of two");
    const Image& center = frames[frames.size() / 2];
    const int w = center.width();
    const int h = center.height();
    if (n > w || n > h) throw InvalidArgument("wiener tile larger than image");
    if (params.noise_variance && !(*params.noise_variance >= 0.0)) {
        throw InvalidArgument("noise_variance must be >= 0");
    }
    if (!params.noise_variance && (!(params.alpha > 0.0) || params.n_frames < 1)) {
        throw InvalidArgument("noise model needs alpha > 0 and n_frames >= 1");
    }

    const auto warped = warp_all(frames, flows);
    const std::size_t c_idx = frames.size() / 2;
    const auto total = static_cast<double>(frames.size());

    std::vector<double> window(n);
    for (int i = 0; i < n; ++i) {
        window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (i + 0.5) / n);
    }
    double energy1d = 0.0;
    for (double v : window) energy1d += v * v;
    // Noise power of the difference of two windowed tiles.
    const double noise_gain = 2.0 * energy1d * energy1d;

    const int ch = center.channels();
    Image residual(w, h, ch);
    std::vector<double> weight_acc(center.pixel_count(), 0.0);

    Fft2d fft(n);
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    std::vector<double> tile(nn);
    std::vector<double> diff_tile(nn);
    std::vector<std::complex<double>> center_spec(nn);
    std::vector<std::complex<double>> alt_spec(nn);
    std::vector<std::complex<double>> acc_spec(nn);

    auto clampi = [](int v, int lo, int hi) { return std::max(lo, std::min(hi, v)); };
    const int step = n / 2;
    for (int y0 = -step; y0 < h; y0 += step) {
        for (int x0 = -step; x0 < w; x0 += step) {
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < n; ++i) {
                    const int x = x0 + i;
                    const int y = y0 + j;
                    if (x >= 0 && x < w && y >= 0 && y < h) {
                        weight_acc[static_cast<std::size_t>(y) * w + x] +=
                            window[i] * window[j] * window[i] * window[j];
                    }
                }
            }
            for (int c = 0; c < ch; ++c) {
                double sigma2 = 0.0;
                if (params.noise_variance) {
                    sigma2 = *params.noise_variance;
                } else {
                    double mean = 0.0;
                    int count = 0;
                    for (int j = std::max(0, y0); j < std::min(h, y0 + n); ++j) {
                        for (int i = std::max(0, x0); i < std::min(w, x0 + n); ++i) {
                            mean += center.at(i, j, c);
                            ++count;
                        }
                    }
                    sigma2 = bernoulli_noise_variance(mean / std::max(1, count), params.n_frames,
                                                      params.alpha);
                }
                const double shrink_noise = noise_gain * sigma2;

                for (int j = 0; j < n; ++j) {
                    const int y = clampi(y0 + j, 0, h - 1);
                    for (int i = 0; i < n; ++i) {
                        const int x = clampi(x0 + i, 0, w - 1);
                        tile[j * n + i] = window[i] * window[j] * center.at(x, y, c);
                    }
                }
                fft.forward(tile, center_spec);
                std::fill(acc_spec.begin(), acc_spec.end(), std::complex<double>{});
                for (std::size_t z = 0; z < frames.size(); ++z) {
                    if (z == c_idx) continue;
                    const auto& wz = warped[z];
                    for (int j = 0; j < n; ++j) {
                        const int y = clampi(y0 + j, 0, h - 1);
                        for (int i = 0; i < n; ++i) {
                            const int x = clampi(x0 + i, 0, w - 1);
                            const bool ok = wz.valid[static_cast<std::size_t>(y) * w + x] != 0;
                            const double v = ok ? wz.image.at(x, y, c) : center.at(x, y, c);
                            tile[j * n + i] = window[i] * window[j] * v;
                        }
                    }
                    fft.forward(tile, alt_spec);
                    for (std::size_t k = 0; k < nn; ++k) {
                        const auto d = alt_spec[k] - center_spec[k];
                        const double d2 = std::norm(d);
                        const double s = d2 > 0.0 || shrink_noise > 0.0
                                             ? d2 / (d2 + shrink_noise)
                                             : 1.0;
                        acc_spec[k] += s * d;
                    }
                }
                for (auto& v : acc_spec) v /= total;
                fft.inverse(acc_spec, diff_tile);
                for (int j = 0; j < n; ++j) {
                    const int y = y0 + j;
                    if (y < 0 || y >= h) continue;
                    for (int i = 0; i < n; ++i) {
                        const int x = x0 + i;
                        if (x < 0 || x >= w) continue;
                        residual.at(x, y, c) += window[i] * window[j] * diff_tile[j * n + i];
                    }
                }
            }
        }
    }

    Image out = center;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double wsum = weight_acc[static_cast<std::size_t>(y) * w + x];
            for (int c = 0; c < ch; ++c) out.at(x, y, c) += residual.at(x, y, c) / wsum;
        }
    }
    return out;
}

Image merge_burst(std::span<const Image> frames, std::span<const FlowField> flows,
                  const MergeConfig& cfg) {
    cfg.validate();
    check_burst(frames, flows);
    const Image& center = frames[frames.size() / 2];

    Image fused;
    if (cfg.mode == MergeMode::Wiener) {
        fused = wiener_merge(frames, flows, cfg.wiener);
    } else {
        const auto warped = warp_all(frames, flows);
        const std::size_t t = frames.size();
        const int ch = center.channels();
        fused = center;
        std::vector<double> mag2(t);
        std::vector<std::uint8_t> valid(t);
        std::vector<double> weights(t);
        for (int y = 0; y < center.height(); ++y) {
            for (int x = 0; x < center.width(); ++x) {
                const std::size_t p = static_cast<std::size_t>(y) * center.width() + x;
                std::size_t n_valid = 0;
                for (std::size_t i = 0; i < t; ++i) {
                    valid[i] = warped[i].valid[p];
                    mag2[i] = i == t / 2 ? 0.0 : flows[i].magnitude2(x, y);
                    n_valid += valid[i];
                }
                if (n_valid == 0) continue;  // keep the center value
                if (cfg.mode == MergeMode::Adaptive) {
                    adaptive_weights(mag2, valid, cfg, weights);
                } else {
                    for (std::size_t i = 0; i < t; ++i) {
                        weights[i] = valid[i] ? 1.0 / static_cast<double>(n_valid) : 0.0;
                    }
                }
                // Residual form: identical frames reproduce the center exactly.
                for (int c = 0; c < ch; ++c) {
                    const double base = center.at(x, y, c);
                    double acc = 0.0;
                    for (std::size_t i = 0; i < t; ++i) {
                        if (weights[i] != 0.0) acc += weights[i] * (warped[i].image.at(x, y, c) - base);
                    }
                    fused.at(x, y, c) = base + acc;
                }
            }
        }
    }

    Image out = center;
    auto o = out.data();
    const auto f = fused.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += cfg.delta * (f[i] - o[i]);
    return out;
}

Image gray_world_wb(const Image& img) {
    if (img.channels() != 3) throw InvalidArgument("gray world needs a 3-channel image");
    if (img.empty()) throw InvalidArgument("gray world on an empty image");
    double means[3] = {0.0, 0.0, 0.0};
    for (std::size_t p = 0; p < img.pixel_count(); ++p) {
        for (int c = 0; c < 3; ++c) means[c] += img.data()[p * 3 + c];
    }
    for (double& m : means) m /= static_cast<double>(img.pixel_count());
    for (int c = 0; c < 3; ++c) {
        if (!(means[c] > 0.0)) {
            std::ostringstream msg;
            msg << "gray world: channel " << c << " has non-positive mean " << means[c];
            throw InvalidArgument(msg.str());
        }
    }
    const double global = (means[0] + means[1] + means[2]) / 3.0;
    Image out = img;
    auto data = out.data();
    for (std::size_t p = 0; p < img.pixel_count(); ++p) {
        for (int c = 0; c < 3; ++c) data[p * 3 + c] *= global / means[c];
    }
    return out;
}

}  // namespace qburst
