#include "doctest.h"
#include "qburst/flow.hpp"
#include "qburst/synthetic.hpp"
#include "test_util.hpp"

using namespace qburst;

namespace {

// texture(x - sx, y - sy): content moved by (+sx, +sy)
Image texture(int w, int h, int sx = 0, int sy = 0) {
    Image img(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.at(x, y) = value_noise(x - sx, y - sy, 6.0, 5);
    return img;
}

}  // namespace

TEST_CASE("self match is zero everywhere") {
    const auto img = texture(64, 48);
    const auto flow = block_match_flow(img, img);
    for (int y = 0; y < 48; ++y)
        for (int x = 0; x < 64; ++x) {
            CHECK(flow.dx(x, y) == 0.0);
            CHECK(flow.dy(x, y) == 0.0);
            CHECK(flow.valid(x, y));
        }
}

TEST_CASE("a moved source points back into the target") {
    const auto ref = texture(64, 64);
    const auto moved = texture(64, 64, 3, 0);
    const auto flow = block_match_flow(moved, ref);
    for (int y = 16; y < 48; ++y)
        for (int x = 16; x < 48; ++x) {
            CHECK(flow.dx(x, y) == -3.0);
            CHECK(flow.dy(x, y) == 0.0);
        }
    const auto back = block_match_flow(ref, moved);
    CHECK(back.dx(32, 32) == 3.0);
}

TEST_CASE("flat images tie-break to zero displacement") {
    const Image flat(40, 40, 1, 0.3);
    const auto flow = block_match_flow(flat, flat);
    for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 40; ++x) CHECK(flow.magnitude2(x, y) == 0.0);
}

TEST_CASE("flow threshold marks bad patches invalid") {
    const auto a = texture(32, 32);
    const auto b = testutil::random_image(32, 32, 1, 12);
    BlockMatchParams params;
    params.max_sad = 1e-6;
    const auto flow = block_match_flow(a, b, params);
    CHECK(!flow.valid(5, 5));
    params.max_sad = std::numeric_limits<double>::infinity();
    params.max_sad_at_level = [](double mean) { return mean * 0.0 - 1.0; };
    CHECK(!block_match_flow(a, a, params).valid(20, 20));
}

TEST_CASE("block matching preconditions") {
    const auto img = texture(32, 32);
    CHECK_THROWS_AS(block_match_flow(img, texture(32, 31)), InvalidArgument);
    CHECK_THROWS_AS(block_match_flow(texture(8, 8), texture(8, 8)), InvalidArgument);
    BlockMatchParams bad;
    bad.radius = 0;
    CHECK_THROWS_AS(block_match_flow(img, img, bad), InvalidArgument);
}

TEST_CASE("multi-channel input matches on the channel mean") {
    Image rgb(48, 48, 3);
    const auto g = texture(48, 48, 2, 1);
    for (int y = 0; y < 48; ++y)
        for (int x = 0; x < 48; ++x)
            for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = g.at(x, y) * (0.5 + 0.25 * c);
    Image ref(48, 48, 3);
    const auto g0 = texture(48, 48);
    for (int y = 0; y < 48; ++y)
        for (int x = 0; x < 48; ++x)
            for (int c = 0; c < 3; ++c) ref.at(x, y, c) = g0.at(x, y) * (0.5 + 0.25 * c);
    const auto flow = block_match_flow(rgb, ref);
    CHECK(flow.dx(24, 24) == -2.0);
    CHECK(flow.dy(24, 24) == -1.0);
}

TEST_CASE("warp with zero flow is the identity") {
    const auto img = testutil::random_image(13, 9, 3, 3);
    const auto r = warp(img, FlowField::zero(13, 9));
    CHECK(r.image == img);
    for (auto v : r.valid) CHECK(v == 1);
}

TEST_CASE("warp with an integer flow copies exactly") {
    const auto img = testutil::random_image(20, 10, 1, 6);
    const auto r = warp(img, FlowField::constant(20, 10, 2.0, -1.0));
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 20; ++x) {
            const bool inside = x + 2 < 20 && y - 1 >= 0;
            CHECK(static_cast<bool>(r.valid[static_cast<std::size_t>(y) * 20 + x]) == inside);
            if (inside) CHECK(r.image.at(x, y) == img.at(x + 2, y - 1));
        }
}

TEST_CASE("warp of a moved frame with its flow recovers the reference") {
    const auto ref = texture(64, 64);
    const auto moved = texture(64, 64, -2, 3);
    // flow from ref into moved: ref(p) = moved(p + d)
    const auto flow = block_match_flow(ref, moved);
    const auto r = warp(moved, flow);
    for (int y = 16; y < 48; ++y)
        for (int x = 16; x < 48; ++x) CHECK(r.image.at(x, y) == ref.at(x, y));
}

TEST_CASE("bilinear warp interpolates halfway") {
    Image img(2, 1, 1);
    img.at(0, 0) = 1.0;
    img.at(1, 0) = 3.0;
    FlowField f(2, 1);
    f.set(0, 0, 0.5, 0.0);
    f.set(1, 0, 0.0, 0.0, false);
    const auto r = warp(img, f);
    CHECK(r.image.at(0, 0) == doctest::Approx(2.0));
    CHECK(r.valid[0] == 1);
    CHECK(r.valid[1] == 0);
    CHECK_THROWS_AS(warp(img, FlowField(3, 1)), InvalidArgument);
}
