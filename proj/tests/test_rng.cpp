#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "llr/rng.hpp"

#include <cmath>
#include <vector>

using namespace llr;

TEST_CASE("philox4x32-10 known-answer vectors") {
    // Published test vectors of the Random123 reference implementation.
    auto r = philox4x32({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(r[0] == 0x6627e8d5u);
    CHECK(r[1] == 0xe169c58du);
    CHECK(r[2] == 0xbc57ac4cu);
    CHECK(r[3] == 0x9b00dbd8u);

    r = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                   {0xffffffffu, 0xffffffffu});
    CHECK(r[0] == 0x408f276du);
    CHECK(r[1] == 0x41c83b0eu);
    CHECK(r[2] == 0xa20bc7c6u);
    CHECK(r[3] == 0x6d5451fdu);

    r = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                   {0xa4093822u, 0x299f31d0u});
    CHECK(r[0] == 0xd16cfe09u);
    CHECK(r[1] == 0x94fdccebu);
    CHECK(r[2] == 0x5001e420u);
    CHECK(r[3] == 0x24126ea1u);
}

TEST_CASE("split_seed separates streams") {
    CHECK(split_seed(1, 0) != split_seed(1, 1));
    CHECK(split_seed(1, 0) != split_seed(2, 0));
    CHECK(split_seed(42, 7) == split_seed(42, 7));
}

TEST_CASE("uniform draws live in [0,1) and are coordinate-pure") {
    const CounterRng rng(123, 0);
    for (int i = -3; i <= 3; ++i) {
        for (int j = -3; j <= 3; ++j) {
            const double u = rng.uniform01(i, j);
            CHECK(u >= 0.0);
            CHECK(u < 1.0);
            CHECK(u == rng.uniform01(i, j));
        }
    }
    CHECK(rng.uniform01(0, 0) != rng.uniform01(0, 1));
    CHECK(rng.uniform01(0, 0) != rng.uniform01(0, 0, 1));
    const CounterRng other(123, 1);
    CHECK(rng.uniform01(0, 0) != other.uniform01(0, 0));
}

TEST_CASE("normal draws have roughly standard moments") {
    const CounterRng rng(2026, 5);
    const int n = 20000;
    double sum = 0.0;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal(i, 0);
        sum += z;
        ss += z * z;
    }
    const double mean = sum / n;
    const double var = ss / n - mean * mean;
    CHECK(std::abs(mean) < 0.03);
    CHECK(std::abs(var - 1.0) < 0.05);
}
