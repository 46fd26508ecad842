#include "qburst/demosaic.hpp"

#include <array>

namespace qburst {

namespace {

Image demosaic_bilinear(const Image& cfa, BayerPattern pattern) {
    static constexpr int kWeight[3][3] = {{1, 2, 1}, {2, 4, 2}, {1, 2, 1}};
    const int w = cfa.width();
    const int h = cfa.height();
    Image out(w, h, 3);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int native = cfa_channel(pattern, x, y);
            std::array<double, 3> sum{};
            std::array<int, 3> weight{};
            for (int j = -1; j <= 1; ++j) {
                const int yy = y + j;
                if (yy < 0 || yy >= h) continue;
                for (int i = -1; i <= 1; ++i) {
                    const int xx = x + i;
                    if (xx < 0 || xx >= w) continue;
                    const int c = cfa_channel(pattern, xx, yy);
                    sum[c] += kWeight[j + 1][i + 1] * cfa.at(xx, yy);
                    weight[c] += kWeight[j + 1][i + 1];
                }
            }
            for (int c = 0; c < 3; ++c) {
                if (c == native) {
                    out.at(x, y, c) = cfa.at(x, y);
                } else {
                    // weight is zero only on 1-pixel-wide images
                    out.at(x, y, c) = weight[c] > 0 ? sum[c] / weight[c] : cfa.at(x, y);
                }
            }
        }
    }
    return out;
}

int reflect(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * (n - 1) - i;
    }
    return i;
}

using Kernel = std::array<std::array<double, 5>, 5>;

// Malvar, He, Cutler (2004), coefficients scaled by 8.
constexpr Kernel kGreenAtRB{{{0, 0, -1, 0, 0},
                             {0, 0, 2, 0, 0},
                             {-1, 2, 4, 2, -1},
                             {0, 0, 2, 0, 0},
                             {0, 0, -1, 0, 0}}};
// Missing channel has horizontal neighbours at this green site.
constexpr Kernel kAtGreenRowNeighbours{{{0, 0, 0.5, 0, 0},
                                        {0, -1, 0, -1, 0},
                                        {-1, 4, 5, 4, -1},
                                        {0, -1, 0, -1, 0},
                                        {0, 0, 0.5, 0, 0}}};
constexpr Kernel kAtGreenColNeighbours{{{0, 0, -1, 0, 0},
                                        {0, -1, 4, -1, 0},
                                        {0.5, 0, 5, 0, 0.5},
                                        {0, -1, 4, -1, 0},
                                        {0, 0, -1, 0, 0}}};
constexpr Kernel kRedBlueAtBlueRed{{{0, 0, -1.5, 0, 0},
                                    {0, 2, 0, 2, 0},
                                    {-1.5, 0, 6, 0, -1.5},
                                    {0, 2, 0, 2, 0},
                                    {0, 0, -1.5, 0, 0}}};

double apply(const Image& cfa, int x, int y, const Kernel& k) {
    double sum = 0.0;
    for (int j = -2; j <= 2; ++j) {
        const int yy = reflect(y + j, cfa.height());
        for (int i = -2; i <= 2; ++i) {
            const double kv = k[j + 2][i + 2];
            if (kv != 0.0) sum += kv * cfa.at(reflect(x + i, cfa.width()), yy);
        }
    }
    return sum / 8.0;
}

Image demosaic_mhc(const Image& cfa, BayerPattern pattern) {
    const int w = cfa.width();
    const int h = cfa.height();
    Image out(w, h, 3);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int native = cfa_channel(pattern, x, y);
            out.at(x, y, native) = cfa.at(x, y);
            if (native == 1) {
                // Channel found left/right of this green site.
                const int row_channel = cfa_channel(pattern, x + 1, y);
                const int col_channel = 2 - row_channel;
                out.at(x, y, row_channel) = apply(cfa, x, y, kAtGreenRowNeighbours);
                out.at(x, y, col_channel) = apply(cfa, x, y, kAtGreenColNeighbours);
            } else {
                out.at(x, y, 1) = apply(cfa, x, y, kGreenAtRB);
                out.at(x, y, 2 - native) = apply(cfa, x, y, kRedBlueAtBlueRed);
            }
        }
    }
    return out;
}

}  // namespace

Image demosaic(const Image& cfa, BayerPattern pattern, DemosaicMethod method) {
    if (cfa.channels() != 1) throw InvalidArgument("demosaic expects a one-channel CFA image");
    if (static_cast<unsigned>(pattern) > static_cast<unsigned>(BayerPattern::GBRG)) {
        throw InvalidArgument("unknown Bayer pattern");
    }
    switch (method) {
        case DemosaicMethod::Bilinear: return demosaic_bilinear(cfa, pattern);
        case DemosaicMethod::MalvarHeCutler: return demosaic_mhc(cfa, pattern);
    }
    throw InvalidArgument("unknown demosaic method");
}

}  // namespace qburst
