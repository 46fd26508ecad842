#include "doctest.h"
#include "qburst/demosaic.hpp"
#include "qburst/quanta_sim.hpp"
#include "test_util.hpp"

using namespace qburst;

TEST_CASE("flat field stays flat") {
    for (auto p : kAllBayerPatterns) {
        for (auto m : {DemosaicMethod::Bilinear, DemosaicMethod::MalvarHeCutler}) {
            const auto rgb = demosaic(Image(9, 7, 1, 0.37), p, m);
            REQUIRE(rgb.channels() == 3);
            for (double v : rgb.data()) CHECK(v == doctest::Approx(0.37).epsilon(1e-12));
        }
    }
}

TEST_CASE("native samples are preserved") {
    const auto cfa = testutil::random_image(10, 8, 1, 4);
    for (auto p : kAllBayerPatterns) {
        for (auto m : {DemosaicMethod::Bilinear, DemosaicMethod::MalvarHeCutler}) {
            const auto rgb = demosaic(cfa, p, m);
            for (int y = 0; y < 8; ++y)
                for (int x = 0; x < 10; ++x) CHECK(rgb.at(x, y, cfa_channel(p, x, y)) == cfa.at(x, y));
        }
    }
}

TEST_CASE("bilinear matches a brute-force neighbourhood mean") {
    const int w = 6, h = 6;
    const auto cfa = testutil::random_image(w, h, 1, 17);
    for (auto p : kAllBayerPatterns) {
        const auto rgb = demosaic(cfa, p, DemosaicMethod::Bilinear);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                for (int c = 0; c < 3; ++c) {
                    if (c == cfa_channel(p, x, y)) continue;
                    double sum = 0.0;
                    int n = 0;
                    for (int yy = y - 1; yy <= y + 1; ++yy)
                        for (int xx = x - 1; xx <= x + 1; ++xx) {
                            if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
                            if (cfa_channel(p, xx, yy) != c) continue;
                            sum += cfa.at(xx, yy);
                            ++n;
                        }
                    REQUIRE(n > 0);
                    CHECK(rgb.at(x, y, c) == doctest::Approx(sum / n).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("both methods reproduce a linear ramp in the interior") {
    const int w = 16, h = 12;
    Image rgb(w, h, 3);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = 0.1 + 0.02 * x + 0.03 * y;
    for (auto p : kAllBayerPatterns) {
        for (auto m : {DemosaicMethod::Bilinear, DemosaicMethod::MalvarHeCutler}) {
            const auto out = demosaic(mosaic(rgb, p), p, m);
            for (int y = 2; y < h - 2; ++y)
                for (int x = 2; x < w - 2; ++x)
                    for (int c = 0; c < 3; ++c)
                        CHECK(out.at(x, y, c) == doctest::Approx(rgb.at(x, y, c)).epsilon(1e-12));
        }
    }
}

TEST_CASE("demosaic rejects multi-channel input") {
    CHECK_THROWS_AS(demosaic(Image(4, 4, 3), BayerPattern::RGGB), InvalidArgument);
    CHECK_THROWS_AS(demosaic(Image(), BayerPattern::RGGB), InvalidArgument);
}

TEST_CASE("tiny images") {
    const auto one = demosaic(Image(1, 1, 1, 0.5), BayerPattern::RGGB);
    CHECK(one.at(0, 0, 0) == 0.5);
    const auto strip = demosaic(testutil::random_image(1, 5, 1, 2), BayerPattern::GRBG,
                                DemosaicMethod::MalvarHeCutler);
    CHECK(strip.height() == 5);
}
