#include "qburst/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace qburst {

namespace {

void require_same_shape(const Image& a, const Image& b, const char* what) {
    if (!a.same_shape(b)) {
        throw InvalidArgument(std::string(what) + ": image shapes differ (" +
                              std::to_string(a.width()) + "x" + std::to_string(a.height()) + "x" +
                              std::to_string(a.channels()) + " vs " + std::to_string(b.width()) +
                              "x" + std::to_string(b.height()) + "x" +
                              std::to_string(b.channels()) + ")");
    }
}

std::vector<double> gaussian_kernel(int size, double sigma) {
    std::vector<double> k(size);
    const double mid = (size - 1) / 2.0;
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        k[i] = std::exp(-((i - mid) * (i - mid)) / (2.0 * sigma * sigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Separable "valid" filtering of one channel.
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h,
                                 const std::vector<double>& k) {
    const int n = static_cast<int>(k.size());
    const int ow = w - n + 1;
    const int oh = h - n + 1;
    std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += k[i] * src[static_cast<std::size_t>(y) * w + x + i];
            tmp[static_cast<std::size_t>(y) * ow + x] = s;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += k[j] * tmp[static_cast<std::size_t>(y + j) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = s;
        }
    }
    return out;
}

}  // namespace

double mse(const Image& a, const Image& b) {
    require_same_shape(a, b, "mse");
    if (a.empty()) throw InvalidArgument("mse: empty images");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        sum += d * d;
    }
    return sum / static_cast<double>(a.size());
}

PsnrResult psnr(const Image& a, const Image& b, double peak) {
    require_same_shape(a, b, "psnr");
    if (!(peak > 0.0)) throw InvalidArgument("psnr: peak must be > 0");
    if (a.empty()) throw InvalidArgument("psnr: empty images");
    const int ch = a.channels();
    double db_sum = 0.0;
    int finite = 0;
    for (int c = 0; c < ch; ++c) {
        double sum = 0.0;
        for (std::size_t p = 0; p < a.pixel_count(); ++p) {
            const double d = a.data()[p * ch + c] - b.data()[p * ch + c];
            sum += d * d;
        }
        const double m = sum / static_cast<double>(a.pixel_count());
        if (m > 0.0) {
            db_sum += 10.0 * std::log10(peak * peak / m);
            ++finite;
        }
    }
    if (finite == 0) return {std::numeric_limits<double>::infinity(), true};
    return {db_sum / finite, false};
}

double ssim(const Image& a, const Image& b, const SsimParams& params) {
    require_same_shape(a, b, "ssim");
    if (a.width() < params.window || a.height() < params.window) {
        throw InvalidArgument("ssim: image smaller than the " + std::to_string(params.window) +
                              "-pixel window");
    }
    const double c1 = (params.k1 * params.dynamic_range) * (params.k1 * params.dynamic_range);
    const double c2 = (params.k2 * params.dynamic_range) * (params.k2 * params.dynamic_range);
    const auto kernel = gaussian_kernel(params.window, params.sigma);
    const int w = a.width();
    const int h = a.height();
    const std::size_t np = a.pixel_count();

    double total = 0.0;
    for (int c = 0; c < a.channels(); ++c) {
        std::vector<double> xa(np), xb(np), aa(np), bb(np), ab(np);
        for (std::size_t p = 0; p < np; ++p) {
            xa[p] = a.data()[p * a.channels() + c];
            xb[p] = b.data()[p * a.channels() + c];
            aa[p] = xa[p] * xa[p];
            bb[p] = xb[p] * xb[p];
            ab[p] = xa[p] * xb[p];
        }
        const auto mu_a = filter_valid(xa, w, h, kernel);
        const auto mu_b = filter_valid(xb, w, h, kernel);
        const auto e_aa = filter_valid(aa, w, h, kernel);
        const auto e_bb = filter_valid(bb, w, h, kernel);
        const auto e_ab = filter_valid(ab, w, h, kernel);
        double sum = 0.0;
        for (std::size_t i = 0; i < mu_a.size(); ++i) {
            const double ma2 = mu_a[i] * mu_a[i];
            const double mb2 = mu_b[i] * mu_b[i];
            const double mab = mu_a[i] * mu_b[i];
            const double va = e_aa[i] - ma2;
            const double vb = e_bb[i] - mb2;
            const double cov = e_ab[i] - mab;
            sum += ((2.0 * mab + c1) * (2.0 * cov + c2)) / ((ma2 + mb2 + c1) * (va + vb + c2));
        }
        total += sum / static_cast<double>(mu_a.size());
    }
    return total / a.channels();
}

WarpingError warping_error(std::span<const Image> recon, std::span<const FlowField> flows) {
    if (recon.size() < 2) throw InvalidArgument("warping error needs at least two frames");
    if (flows.size() != recon.size() - 1) {
        throw InvalidArgument("warping error needs one flow per consecutive pair");
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t t = 0; t + 1 < recon.size(); ++t) {
        require_same_shape(recon[t], recon[t + 1], "warping_error");
        const auto warped = warp(recon[t + 1], flows[t]);
        const int ch = recon[t].channels();
        for (std::size_t p = 0; p < recon[t].pixel_count(); ++p) {
            if (!warped.valid[p]) continue;
            double sq = 0.0;
            for (int c = 0; c < ch; ++c) {
                const double d = recon[t].data()[p * ch + c] - warped.image.data()[p * ch + c];
                sq += d * d;
            }
            sum += sq / ch;
            ++count;
        }
    }
    WarpingError out;
    out.valid_pixels = count;
    out.e_warp = count > 0 ? sum / static_cast<double>(count)
                           : std::numeric_limits<double>::quiet_NaN();
    out.e_star = 1e3 * out.e_warp;
    return out;
}

}  // namespace qburst
