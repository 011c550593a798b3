#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "petspu/crystal_lut.hpp"
#include "petspu/io_util.hpp"
#include "testgen.hpp"

using namespace petspu;

namespace {

// Brute-force transition scan of one horizontal line of a dense CLT,
// independent of decompose().
std::vector<uint16_t> scan_col_transitions(const FullClt& clt, int y) {
    std::vector<uint16_t> out;
    for (int x = 1; x < kPlaneSide; ++x)
        if (clt.at(x, y) % kGridSide != clt.at(x - 1, y) % kGridSide)
            out.push_back(uint16_t(x));
    return out;
}

}  // namespace

TEST_CASE("uniform grid lookup corners and center") {
    const FullClt clt = make_uniform_grid_clt();
    clt.validate();
    CHECK(clt.lookup({0, 0}).id == 0);
    CHECK(clt.lookup({511, 511}).id == 528);

    // Brute-force region scan: count run transitions up to (256, 256)
    // instead of trusting the generator's edge arithmetic.
    int col = 0, row = 0;
    for (int x = 1; x <= 256; ++x) col += clt.at(x, 256) != clt.at(x - 1, 256);
    for (int y = 1; y <= 256; ++y) row += clt.at(256, y) != clt.at(256, y - 1);
    CHECK(col == 11);
    CHECK(row == 11);
    CHECK(clt.lookup({256, 256}).id == 264);  // 11*23 + 11
}

TEST_CASE("uniform grid boundaries match the closed form on every line") {
    const FullClt clt = make_uniform_grid_clt();
    const BoundaryClt b = decompose(clt);
    b.validate();

    std::vector<uint16_t> expected;
    for (int j = 1; j <= kBoundariesPerLine; ++j)
        expected.push_back(uint16_t((2 * 512 * j + 23) / (2 * 23)));  // round(512j/23)

    for (int y = 0; y < kPlaneSide; ++y) {
        const auto scanned = scan_col_transitions(clt, y);
        REQUIRE(scanned.size() == size_t(kBoundariesPerLine));
        for (int i = 0; i < kBoundariesPerLine; ++i) {
            CHECK(b.x_line(y)[i] == expected[i]);
            CHECK(b.x_line(y)[i] == scanned[i]);
        }
    }
}

TEST_CASE("non-separable CLT is rejected with line diagnostics") {
    FullClt clt = make_uniform_grid_clt();
    // Make line y=100 skip column 1: overwrite the col-1 stripe with col 2.
    for (int x = 0; x < kPlaneSide; ++x) {
        const uint16_t id = clt.at(x, 100);
        if (id % kGridSide == 1) clt.at(x, 100) = uint16_t(id + 1);
    }
    try {
        decompose(clt);
        FAIL("expected NotSeparableError");
    } catch (const NotSeparableError& e) {
        CHECK(e.direction == NotSeparableError::Direction::X);
        CHECK(e.line == 100);
        CHECK(std::string(e.what()).find("y=100") != std::string::npos);
    }
}

TEST_CASE("boundary lookup equals dense lookup exhaustively") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 3; ++trial) {
        const FullClt clt = testgen::make_random_separable_clt(rng);
        const BoundaryClt b = decompose(clt);
        for (int y = 0; y < kPlaneSide; ++y)
            for (int x = 0; x < kPlaneSide; ++x) {
                const RawPosition p{uint16_t(x), uint16_t(y)};
                REQUIRE(b.lookup(p).id == clt.lookup(p).id);
            }
    }
}

TEST_CASE("boundary lookup equals dense lookup on random samples") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        const FullClt clt = testgen::make_random_separable_clt(rng);
        const BoundaryClt b = decompose(clt);
        for (int i = 0; i < 1000; ++i) {
            const RawPosition p{uint16_t(testgen::bounded(rng, kPlaneSide)),
                                uint16_t(testgen::bounded(rng, kPlaneSide))};
            CHECK(b.lookup(p).id == clt.lookup(p).id);
        }
    }
}

TEST_CASE("position zero always decodes to crystal zero") {
    std::mt19937_64 rng(44);
    const FullClt clt = testgen::make_random_separable_clt(rng);
    const BoundaryClt b = decompose(clt);
    CHECK(b.lookup({0, 0}).id == 0);  // boundaries are >= 1 by invariant

    const BoundaryClt u = decompose(make_uniform_grid_clt());
    CHECK(u.lookup({511, 511}).id == 528);
}

TEST_CASE("decode components are monotone along each axis") {
    std::mt19937_64 rng(45);
    const FullClt clt = testgen::make_random_separable_clt(rng);
    const BoundaryClt b = decompose(clt);
    for (int y = 0; y < kPlaneSide; y += 37) {
        int prev = -1;
        for (int x = 0; x < kPlaneSide; ++x) {
            const int col = b.lookup({uint16_t(x), uint16_t(y)}).id % kGridSide;
            CHECK(col >= prev);
            prev = col;
        }
    }
    for (int x = 0; x < kPlaneSide; x += 37) {
        int prev = -1;
        for (int y = 0; y < kPlaneSide; ++y) {
            const int row = b.lookup({uint16_t(x), uint16_t(y)}).id / kGridSide;
            CHECK(row >= prev);
            prev = row;
        }
    }
}

TEST_CASE("decompose is deterministic") {
    std::mt19937_64 rng(46);
    const FullClt clt = testgen::make_random_separable_clt(rng);
    CHECK(decompose(clt) == decompose(clt));
}

TEST_CASE("memory footprint of the production geometry") {
    const auto f = footprint(9, 529);
    CHECK(f.full_bits == 2'621'440);      // 2^18 cells x 10-bit ids = 2.5 Mb
    CHECK(f.boundary_bits == 202'752);    // 2 x 512 x 22 x 9
    CHECK(bits_to_mb(f.full_bits) == doctest::Approx(2.5));
    CHECK(bits_to_mb(f.boundary_bits) == doctest::Approx(0.19).epsilon(0.02));
    CHECK(f.ratio() == doctest::Approx(12.93).epsilon(0.001));

    // The often-quoted 13.16 comes from the rounded per-block quotient.
    const double rounded_quotient = 2.5 / 0.19;
    CHECK(rounded_quotient == doctest::Approx(13.16).epsilon(0.001));
}

TEST_CASE("memory footprint smallest legal instance") {
    const auto f = footprint(1, 4);
    CHECK(f.full_bits == 8);      // 4 cells x 2-bit ids
    CHECK(f.boundary_bits == 4);  // 2 directions x 2 lines x 1 boundary x 1 bit
}

TEST_CASE("memory footprint rejects non-square crystal counts") {
    CHECK_THROWS_AS(footprint(9, 528), std::domain_error);
    CHECK_THROWS_AS(footprint(9, 530), std::domain_error);
    CHECK_THROWS_AS(footprint(0, 529), std::domain_error);
}

TEST_CASE("CLT files round trip") {
    std::mt19937_64 rng(47);
    const FullClt clt = testgen::make_random_separable_clt(rng);
    const BoundaryClt b = decompose(clt);

    clt.save("clt_full_test.bin");
    const FullClt clt2 = FullClt::load("clt_full_test.bin");
    CHECK(clt2.cells() == clt.cells());

    b.save("clt_boundary_test.bin");
    const BoundaryClt b2 = BoundaryClt::load("clt_boundary_test.bin");
    CHECK(b2 == b);

    // A full file does not load as a boundary file and vice versa.
    CHECK_THROWS(BoundaryClt::load("clt_full_test.bin"));
    CHECK_THROWS(FullClt::load("clt_boundary_test.bin"));

    std::remove("clt_full_test.bin");
    std::remove("clt_boundary_test.bin");
}

TEST_CASE("boundary file values use 9 significant bits") {
    std::mt19937_64 rng(48);
    const BoundaryClt b = decompose(testgen::make_random_separable_clt(rng));
    b.save("clt_bits_test.bin");
    const auto bytes = read_file("clt_bits_test.bin");
    for (size_t i = TableFileHeader::kSize; i + 1 < bytes.size(); i += 2) {
        const uint16_t v = get_le16(&bytes[i]);
        CHECK(v < 512);
    }
    std::remove("clt_bits_test.bin");
}
