#include <cmath>

#include "doctest.h"
#include "qburst/metrics.hpp"
#include "test_util.hpp"

using namespace qburst;

namespace {

// Pair used for the reference SSIM value below.
std::pair<Image, Image> reference_pair() {
    Image a(32, 32, 1), b(32, 32, 1);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) {
            a.at(x, y) = ((x * 7 + y * 13) % 17) / 16.0;
            b.at(x, y) = std::clamp(a.at(x, y) * 0.8 + 0.1 * std::sin(x / 3.0) * std::cos(y / 5.0) + 0.05,
                                    0.0, 1.0);
        }
    return {a, b};
}

}  // namespace

TEST_CASE("psnr closed forms") {
    CHECK(psnr(Image(4, 4, 1, 0.5), Image(4, 4, 1, 0.6)).db == doctest::Approx(20.0));
    CHECK(psnr(Image(4, 4, 1, 0.0), Image(4, 4, 1, 1.0)).db == doctest::Approx(0.0));
    CHECK(psnr(Image(4, 4, 1, 0.0), Image(4, 4, 1, 10.0), 10.0).db == doctest::Approx(0.0));
    const auto same = psnr(Image(4, 4, 3, 0.2), Image(4, 4, 3, 0.2));
    CHECK(same.infinite);
    CHECK(std::isinf(same.db));
}

TEST_CASE("psnr reference value") {
    const auto [a, b] = reference_pair();
    CHECK(psnr(a, b).db == doctest::Approx(20.59832347896875).epsilon(1e-10));
    CHECK(psnr(b, a).db == psnr(a, b).db);
}

TEST_CASE("psnr averages channels with nonzero error") {
    Image a(4, 4, 3, 0.5), b(4, 4, 3, 0.5);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) b.at(x, y, 1) = 0.6;
    const auto r = psnr(a, b);
    CHECK(!r.infinite);
    CHECK(r.db == doctest::Approx(20.0));
}

TEST_CASE("metric preconditions") {
    CHECK_THROWS_AS(psnr(Image(2, 2, 1), Image(2, 3, 1)), InvalidArgument);
    CHECK_THROWS_AS(psnr(Image(), Image()), InvalidArgument);
    CHECK_THROWS_AS(psnr(Image(2, 2, 1), Image(2, 2, 1), 0.0), InvalidArgument);
    CHECK_THROWS_AS(mse(Image(2, 2, 1), Image(2, 2, 3)), InvalidArgument);
    CHECK_THROWS_AS(ssim(Image(8, 8, 1), Image(8, 8, 1)), InvalidArgument);
    CHECK(mse(Image(2, 2, 1, 1.0), Image(2, 2, 1, 3.0)) == 4.0);
}

TEST_CASE("ssim of an image with itself is one") {
    const auto a = testutil::random_image(24, 20, 3, 1);
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ssim of flat images has the luminance closed form") {
    const double mu_a = 0.3, mu_b = 0.6;
    const double c1 = 0.01 * 0.01;
    const double expected = (2 * mu_a * mu_b + c1) / (mu_a * mu_a + mu_b * mu_b + c1);
    CHECK(ssim(Image(16, 16, 1, mu_a), Image(16, 16, 1, mu_b)) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("ssim reference value") {
    // Gaussian window 11, sigma 1.5, population covariance, valid region.
    const auto [a, b] = reference_pair();
    CHECK(ssim(a, b) == doctest::Approx(0.9614069968827605).epsilon(1e-9));
    CHECK(ssim(b, a) == doctest::Approx(ssim(a, b)).epsilon(1e-14));
}

TEST_CASE("ssim of independent noise is near zero") {
    const auto a = testutil::random_image(128, 128, 1, 1);
    const auto b = testutil::random_image(128, 128, 1, 2);
    CHECK(std::abs(ssim(a, b)) < 0.1);
}

TEST_CASE("warping error of identical frames is zero") {
    const auto img = testutil::random_image(16, 16, 3, 4);
    const std::vector<Image> frames(3, img);
    const std::vector<FlowField> flows(2, FlowField::zero(16, 16));
    const auto e = warping_error(frames, flows);
    CHECK(e.e_star == 0.0);
    CHECK(e.valid_pixels == 2 * 256);
}

TEST_CASE("warping error of a constant discrepancy") {
    const double d = 0.037;
    std::vector<Image> frames{Image(10, 10, 1, 0.2), Image(10, 10, 1, 0.2 + d), Image(10, 10, 1, 0.2 + 2 * d)};
    const std::vector<FlowField> flows(2, FlowField::zero(10, 10));
    const auto e = warping_error(frames, flows);
    CHECK(std::abs(e.e_star - 1e3 * d * d) < 1e-9);
    CHECK(e.e_warp == doctest::Approx(d * d));
}

TEST_CASE("warping error excludes out-of-bounds and invalid samples") {
    std::vector<Image> frames{testutil::random_image(8, 8, 1, 1), testutil::random_image(8, 8, 1, 2)};
    auto flow = FlowField::constant(8, 8, 3.0, 0.0);
    flow.set_valid(0, 0, false);
    const std::vector<FlowField> flows{flow};
    const auto e = warping_error(frames, flows);
    CHECK(e.valid_pixels == 5 * 8 - 1);

    const std::vector<FlowField> far{FlowField::constant(8, 8, 100.0, 0.0)};
    const auto none = warping_error(frames, far);
    CHECK(none.valid_pixels == 0);
    CHECK(std::isnan(none.e_star));

    CHECK_THROWS_AS(warping_error(std::span(frames).first(1), {}), InvalidArgument);
    CHECK_THROWS_AS(warping_error(frames, {}), InvalidArgument);
}
