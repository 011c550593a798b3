#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "petspu/positioning.hpp"
#include "testgen.hpp"

using namespace petspu;
using oracles::random_valid_integrals;

TEST_CASE("all-equal channels land in the plane center") {
    // x_f = y_f = d_f = 1/2 by symmetry; 255.5 and 7.5 round half-up.
    const ChannelIntegrals c{40, 40, 40, 40, 40, 40, 40, 40};
    const auto r = compute_position(c);
    REQUIRE(r.has_value());
    CHECK(r->pos.x == 256);
    CHECK(r->pos.y == 256);
    CHECK(r->doi.value == 8);
}

TEST_CASE("saturated corner reaches 511") {
    const ChannelIntegrals c{100, 0, 0, 100, 100, 0, 0, 100};
    const auto r = compute_position(c);
    REQUIRE(r.has_value());
    CHECK(r->pos.x == 511);
}

TEST_CASE("worked asymmetric example") {
    // x_f = 0.5*(125/200 + 120/200) = 0.6125, y_f = 0.5*(150/200 + 80/200)
    // = 0.575, d_f = 200/400.
    const ChannelIntegrals c{100, 50, 25, 25, 80, 40, 40, 40};
    const auto r = compute_position(c);
    REQUIRE(r.has_value());
    CHECK(r->pos.x == 313);
    CHECK(r->pos.y == 294);
    CHECK(r->doi.value == 8);

    const auto o = oracles::position(c);
    CHECK(o.x == 313);
    CHECK(o.y == 294);
    CHECK(o.doi == 8);
}

TEST_CASE("zero-sum ends are rejected") {
    ChannelIntegrals c{1, 2, 3, 4, 0, 0, 0, 0};
    CHECK_FALSE(compute_position(c).has_value());
    ChannelIntegrals d{0, 0, 0, 0, 1, 2, 3, 4};
    CHECK_FALSE(compute_position(d).has_value());
    ChannelIntegrals z{};
    CHECK_FALSE(compute_position(z).has_value());
}

TEST_CASE("matches the exact rational oracle on random inputs") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 10000; ++i) {
        const ChannelIntegrals c = random_valid_integrals(rng);
        const auto r = compute_position(c);
        REQUIRE(r.has_value());
        const auto o = oracles::position(c);
        CHECK(r->pos.x == o.x);
        CHECK(r->pos.y == o.y);
        CHECK(r->doi.value == o.doi);
    }
}

TEST_CASE("homogeneous in the input scale") {
    std::mt19937_64 rng(55);
    for (int i = 0; i < 1000; ++i) {
        const ChannelIntegrals base = random_valid_integrals(rng, 8191);
        const uint16_t k = uint16_t(1 + testgen::bounded(rng, 8));
        ChannelIntegrals scaled = base;
        for (uint16_t* f : {&scaled.a1, &scaled.b1, &scaled.c1, &scaled.d1, &scaled.a2, &scaled.b2,
                            &scaled.c2, &scaled.d2})
            *f = uint16_t(*f * k);
        CHECK(compute_position(base) == compute_position(scaled));
    }
}

TEST_CASE("outputs always satisfy the 9-bit and 4-bit ranges") {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 5000; ++i) {
        const auto r = compute_position(random_valid_integrals(rng));
        REQUIRE(r.has_value());
        CHECK(r->pos.x <= 511);
        CHECK(r->pos.y <= 511);
        CHECK(r->doi.value <= 15);
    }
    // extreme single-channel case
    const ChannelIntegrals lo{0, 0, 1, 0, 0, 0, 1, 0};
    const auto r = compute_position(lo);
    REQUIRE(r.has_value());
    CHECK(r->pos.x == 0);
}

TEST_CASE("alternative matched-pair y combination") {
    // y uses (a2+b2)/s2 on end 2 instead of (c2+d2)/s2.
    const ChannelIntegrals c{100, 50, 25, 25, 80, 40, 40, 40};
    const auto r = compute_position(c, End2YPair::MatchedAb);
    REQUIRE(r.has_value());
    // y_f = 0.5*(150/200 + 120/200) = 0.675 -> round(345.0 - eps) = 345
    CHECK(r->pos.y == scale_round(270, 400, 511));
    // x and doi are unaffected by the switch
    CHECK(r->pos.x == 313);
    CHECK(r->doi.value == 8);
}
