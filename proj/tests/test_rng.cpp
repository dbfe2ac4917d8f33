#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "mesocov/rng.hpp"

using namespace mesocov;

TEST_CASE("philox 10-round known-answer vectors") {
    // Salmon et al. reference vectors for philox4x32-10
    {
        uint32_t c[4] = {0, 0, 0, 0};
        uint32_t k[2] = {0, 0};
        Philox4x32::rounds10(c, k);
        CHECK(c[0] == 0x6627e8d5u);
        CHECK(c[1] == 0xe169c58du);
        CHECK(c[2] == 0xbc57ac4cu);
        CHECK(c[3] == 0x9b00dbd8u);
    }
    {
        uint32_t c[4] = {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu};
        uint32_t k[2] = {0xffffffffu, 0xffffffffu};
        Philox4x32::rounds10(c, k);
        CHECK(c[0] == 0x408f276du);
        CHECK(c[1] == 0x41c83b0eu);
        CHECK(c[2] == 0xa20bc7c6u);
        CHECK(c[3] == 0x6d5451fdu);
    }
    {
        uint32_t c[4] = {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u};
        uint32_t k[2] = {0xa4093822u, 0x299f31d0u};
        Philox4x32::rounds10(c, k);
        CHECK(c[0] == 0xd16cfe09u);
        CHECK(c[1] == 0x94fdccebu);
        CHECK(c[2] == 0x5001e420u);
        CHECK(c[3] == 0x24126ea1u);
    }
}

TEST_CASE("streams replay exactly and distinct indices decorrelate") {
    RngStream a(123, 5), b(123, 5), c(123, 6), d(124, 5);
    int same_c = 0, same_d = 0;
    for (int i = 0; i < 256; ++i) {
        uint64_t x = a.next_u64();
        CHECK(x == b.next_u64());
        if (x == c.next_u64()) ++same_c;
        if (x == d.next_u64()) ++same_d;
    }
    CHECK(same_c == 0);
    CHECK(same_d == 0);
}

TEST_CASE("u01 lies in (0,1]") {
    RngStream r(7, 0);
    for (int i = 0; i < 100000; ++i) {
        double u = r.u01();
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
    }
}

TEST_CASE("normal moments match the standard Gaussian") {
    RngStream r(99, 0);
    const int n = 1000000;
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        double x = r.normal();
        s1 += x;
        s2 += x * x;
        s3 += x * x * x;
        s4 += x * x * x * x;
    }
    s1 /= n; s2 /= n; s3 /= n; s4 /= n;
    // 4-sigma bands: sd(mean)=1/sqrt(n), sd(m2)=sqrt(2/n), sd(m3)=sqrt(15/n),
    // sd(m4)=sqrt(96/n)
    CHECK(std::abs(s1) < 4.0 / std::sqrt((double)n));
    CHECK(std::abs(s2 - 1.0) < 4.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(s3) < 4.0 * std::sqrt(15.0 / n));
    CHECK(std::abs(s4 - 3.0) < 4.0 * std::sqrt(96.0 / n));
}

TEST_CASE("block counter never repeats within a stream") {
    RngStream r(1, 2);
    std::set<uint64_t> seen;
    for (int i = 0; i < 4096; ++i) seen.insert(r.next_u64());
    CHECK(seen.size() == 4096);
}
