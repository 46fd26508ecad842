#include <set>
#include <string>

#include "doctest.h"
#include "qburst/rng.hpp"

using qburst::Philox4x32;

TEST_CASE("philox4x32-10 known answers") {
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::generate(C{0, 0, 0, 0}, K{0, 0}) ==
          C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::generate(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                               K{0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::generate(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                               K{0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("philox is usable at compile time") {
    constexpr auto out = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
    static_assert(out[0] == 0x6627e8d5);
}

TEST_CASE("uniform draws are pure functions of their coordinates") {
    const qburst::RngSpec a{42};
    const qburst::RngSpec b{42};
    CHECK(a.uniform(3, 17, 1) == b.uniform(3, 17, 1));
    CHECK(a.uniform(3, 17, 1) != a.uniform(3, 17, 2));
    CHECK(a.uniform(3, 17, 1) != a.uniform(4, 17, 1));
    CHECK(a.uniform(3, 17, 1) != a.uniform(3, 18, 1));
    CHECK(a.uniform(3, 17, 1) != qburst::RngSpec{43}.uniform(3, 17, 1));
    CHECK(a.uniform(3, 17, 1, qburst::RngStream::BinarySample) !=
          a.uniform(3, 17, 1, qburst::RngStream::Synthetic));
}

TEST_CASE("uniform stays in [0,1) and covers the range") {
    const qburst::RngSpec rng{7};
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform(0, static_cast<std::uint64_t>(i), 0);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(lo < 1e-3);
    CHECK(hi > 1.0 - 1e-3);
    // mean of U(0,1): sd of the sample mean is 1/sqrt(12 n) ~ 9.1e-4
    CHECK(std::abs(sum / n - 0.5) < 4 * 9.13e-4);
}

TEST_CASE("high frame bits reach the counter") {
    const qburst::RngSpec rng{1};
    CHECK(rng.uniform(std::uint64_t{1} << 32, 0, 0) != rng.uniform(0, 0, 0));
    CHECK(rng.uniform(0, std::uint64_t{1} << 32, 0) != rng.uniform(0, 0, 0));
}

TEST_CASE("derived seeds differ by name and by parent seed") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 4; ++s) {
        for (const std::string name : {"sequence/a", "sequence/b", "pattern", ""}) {
            seen.insert(qburst::derive_seed(s, name));
        }
    }
    CHECK(seen.size() == 16);
    CHECK(qburst::derive_seed(5, std::string("x")) == qburst::derive_seed(5, std::string("x")));
}

TEST_CASE("fnv1a64 reference values") {
    // Published FNV-1a 64 test vectors.
    CHECK(qburst::fnv1a64("", 0) == 0xcbf29ce484222325ull);
    CHECK(qburst::fnv1a64("a", 1) == 0xaf63dc4c8601ec8cull);
    CHECK(qburst::fnv1a64("foobar", 6) == 0x85944171f73967e8ull);
}

TEST_CASE("mix64 matches splitmix64 output") {
    // First output of splitmix64 seeded with 0.
    CHECK(qburst::mix64(0) == 0xe220a8397b1dcdafull);
}
