#include <cstring>
#include <sstream>

#include "doctest.h"
#include "qburst/photon_cube.hpp"
#include "test_util.hpp"

using namespace qburst;

namespace {

BinaryFrame alternating(int w, int h, int phase) {
    BinaryFrame f{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h), std::nullopt};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) f.bits[static_cast<std::size_t>(y) * w + x] = (x + phase) % 2 == 0;
    return f;
}

CubeHeader mono_header(std::uint32_t w, std::uint32_t h) {
    CubeHeader hd;
    hd.width = w;
    hd.height = h;
    hd.fps = 2000.0;
    hd.seed = 77;
    return hd;
}

std::string serialize(const PhotonCube& cube) {
    std::ostringstream out;
    write_cube(cube, out);
    return out.str();
}

PhotonCube parse(const std::string& bytes) {
    std::istringstream in(bytes);
    return read_cube(in);
}

CubeErrc error_of(const std::string& bytes) {
    try {
        parse(bytes);
    } catch (const CubeError& e) {
        return e.code();
    }
    return CubeErrc{};
}

}  // namespace

TEST_CASE("LSB-first packing") {
    const auto f = alternating(8, 1, 0);  // 1,0,1,0,...
    std::uint8_t byte = 0;
    pack_frame(f, &byte);
    CHECK(byte == 0x55);

    BinaryFrame one{10, 1, std::vector<std::uint8_t>(10, 0), std::nullopt};
    one.bits[9] = 1;
    std::uint8_t two[2] = {0xff, 0xff};
    pack_frame(one, two);
    CHECK(two[0] == 0x00);
    CHECK(two[1] == 0x02);  // pad bits zero
    CHECK(unpack_frame(two, 10, 1, std::nullopt) == one);
}

TEST_CASE("row stride is padded to whole bytes") {
    const auto h = mono_header(13, 3);
    CHECK(h.row_bytes() == 2);
    CHECK(h.frame_bytes() == 6);
    CubeHeader h8 = mono_header(8, 2);
    h8.frame_count = 5;
    CHECK(h8.payload_bytes() == 10);
}

TEST_CASE("header field offsets") {
    CubeHeader h = mono_header(0x01020304, 5);
    h.frame_count = 0x1122334455667788ull;
    h.channels = 3;
    h.pattern = BayerPattern::BGGR;
    h.alpha = 1.5;
    const auto b = encode_header(h);
    REQUIRE(b.size() == kCubeHeaderSize);
    CHECK(std::memcmp(b.data(), "PCUB", 4) == 0);
    CHECK(b[4] == 1);
    CHECK(b[8] == 0x04);
    CHECK(b[11] == 0x01);
    CHECK(b[12] == 5);
    CHECK(b[16] == 0x88);
    CHECK(b[23] == 0x11);
    CHECK(b[32] == 3);
    CHECK(b[36] == 3);  // BGGR
    double alpha = 0.0;
    std::memcpy(&alpha, b.data() + 40, 8);  // host is little-endian in CI
    CHECK(alpha == 1.5);
    CHECK(b[48] == 77);
    CHECK(decode_header(b.data()) == h);
}

TEST_CASE("round trip through a stream") {
    PhotonCube cube(mono_header(11, 4));
    for (int i = 0; i < 5; ++i) cube.append(alternating(11, 4, i));
    const auto bytes = serialize(cube);
    CHECK(bytes.size() == kCubeHeaderSize + 5 * 2 * 4);
    const auto back = parse(bytes);
    CHECK(back == cube);
    CHECK(back.frame(3) == alternating(11, 4, 3));
}

TEST_CASE("zero-frame cube") {
    const PhotonCube cube(mono_header(7, 7));
    const auto bytes = serialize(cube);
    CHECK(bytes.size() == kCubeHeaderSize);
    const auto back = parse(bytes);
    CHECK(back.frame_count() == 0);
    CHECK(back.header().width == 7);
}

TEST_CASE("corrupt inputs are rejected with a specific error") {
    PhotonCube cube(mono_header(16, 2));
    cube.append(alternating(16, 2, 0));
    cube.append(alternating(16, 2, 1));
    const auto good = serialize(cube);

    SUBCASE("bad magic") {
        auto bad = good;
        bad[0] = 'X';
        CHECK(error_of(bad) == CubeErrc::BadMagic);
        CHECK(error_of("") == CubeErrc::BadMagic);
    }
    SUBCASE("version") {
        auto bad = good;
        bad[4] = 2;
        CHECK(error_of(bad) == CubeErrc::VersionMismatch);
    }
    SUBCASE("truncated header") {
        CHECK(error_of(good.substr(0, 30)) == CubeErrc::Truncated);
    }
    SUBCASE("truncated payload names both sizes") {
        try {
            parse(good.substr(0, good.size() - 1));
            FAIL("expected an error");
        } catch (const CubeError& e) {
            CHECK(e.code() == CubeErrc::Truncated);
            const std::string what = e.what();
            CHECK(what.find("expected 8") != std::string::npos);
            CHECK(what.find("got 7") != std::string::npos);
        }
    }
    SUBCASE("inconsistent channels and pattern") {
        auto bad = good;
        bad[32] = 3;  // color without a pattern
        CHECK(error_of(bad) == CubeErrc::InconsistentHeader);
        bad[32] = 2;
        CHECK(error_of(bad) == CubeErrc::InconsistentHeader);
        bad = good;
        bad[36] = 9;
        CHECK(error_of(bad) == CubeErrc::InconsistentHeader);
    }
    SUBCASE("absurd frame count reports truncation") {
        auto bad = good;
        bad[23] = 0x10;
        CHECK(error_of(bad) == CubeErrc::Truncated);
    }
}

TEST_CASE("appending mismatched frames") {
    PhotonCube cube(mono_header(4, 4));
    CHECK_THROWS_AS(cube.append(alternating(4, 3, 0)), CubeError);
    auto colored = alternating(4, 4, 0);
    colored.pattern = BayerPattern::RGGB;
    CHECK_THROWS_AS(cube.append(colored), CubeError);
    CHECK_THROWS_AS(cube.frame(0), CubeError);
    CHECK_THROWS_AS(PhotonCube(mono_header(4, 4), std::vector<std::uint8_t>(3)), CubeError);
}

TEST_CASE("streaming reader") {
    PhotonCube cube(mono_header(9, 3));
    for (int i = 0; i < 6; ++i) cube.append(alternating(9, 3, i));
    std::istringstream in(serialize(cube));
    CubeFrameReader reader(in);
    CHECK(reader.header().frame_count == 6);
    CHECK(reader.read_frame(4) == cube.frame(4));
    CHECK(reader.read_frame(0) == cube.frame(0));

    int seen = 0;
    for (const auto& f : reader.frames(2, 5)) {
        CHECK(f == cube.frame(2 + seen));
        ++seen;
    }
    CHECK(seen == 3);

    int empty = 0;
    for (const auto& f : reader.frames(3, 3)) {
        (void)f;
        ++empty;
    }
    CHECK(empty == 0);
    CHECK_THROWS_AS(reader.frames(4, 2), CubeError);
    CHECK_THROWS_AS(reader.frames(0, 7), CubeError);
    CHECK_THROWS_AS(reader.read_frame(6), CubeError);
}

TEST_CASE("streaming reader detects a truncated frame") {
    PhotonCube cube(mono_header(8, 8));
    for (int i = 0; i < 3; ++i) cube.append(alternating(8, 8, i));
    const auto bytes = serialize(cube);
    std::istringstream in(bytes.substr(0, bytes.size() - 4));
    CubeFrameReader reader(in);
    CHECK(reader.read_frame(1) == cube.frame(1));
    try {
        reader.read_frame(2);
        FAIL("expected an error");
    } catch (const CubeError& e) {
        CHECK(e.code() == CubeErrc::Truncated);
    }
}

TEST_CASE("file round trip and missing file") {
    testutil::TempDir dir("cube");
    CubeHeader h = mono_header(5, 5);
    h.channels = 3;
    h.pattern = BayerPattern::GBRG;
    PhotonCube cube(h);
    auto f = alternating(5, 5, 1);
    f.pattern = BayerPattern::GBRG;
    cube.append(f);
    const auto path = dir.path() / "a.pcube";
    CHECK(write_cube_file(cube, path) == kCubeHeaderSize + 5);
    CHECK(read_cube_file(path) == cube);
    try {
        read_cube_file(dir.path() / "missing.pcube");
        FAIL("expected an error");
    } catch (const CubeError& e) {
        CHECK(e.code() == CubeErrc::Io);
    }
}
