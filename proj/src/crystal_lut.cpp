#include "petspu/crystal_lut.hpp"

#include <bit>
#include <cmath>

#include "petspu/io_util.hpp"

namespace petspu {

namespace {

constexpr char kFullMagic[4] = {'C', 'L', 'T', 'F'};
constexpr char kBoundaryMagic[4] = {'C', 'L', 'T', 'B'};

// round(num/den) half-up, used for the uniform grid edges.
uint32_t div_round(uint32_t num, uint32_t den) { return (2 * num + den) / (2 * den); }

}  // namespace

void FullClt::validate() const {
    std::vector<bool> seen(kCrystalCount, false);
    for (size_t i = 0; i < cells_.size(); ++i) {
        if (cells_[i] >= kCrystalCount)
            throw std::out_of_range("CLT cell " + std::to_string(i) + " holds invalid id " +
                                    std::to_string(cells_[i]));
        seen[cells_[i]] = true;
    }
    for (int id = 0; id < kCrystalCount; ++id)
        if (!seen[id])
            throw std::runtime_error("CLT does not cover crystal id " + std::to_string(id));
}

CrystalId BoundaryClt::lookup(RawPosition p) const {
    const uint16_t* xb = x_line(p.y);
    const uint16_t* yb = y_line(p.x);
    uint32_t xmask = 0, ymask = 0;
    for (int i = 0; i < kBoundariesPerLine; ++i) {
        xmask |= uint32_t(xb[i] <= p.x) << i;
        ymask |= uint32_t(yb[i] <= p.y) << i;
    }
    const int col = std::popcount(xmask);
    const int row = std::popcount(ymask);
    return CrystalId{static_cast<uint16_t>(row * kGridSide + col)};
}

void BoundaryClt::validate() const {
    auto check_line = [](const uint16_t* b, const char* dir, int line) {
        uint16_t prev = 0;
        for (int i = 0; i < kBoundariesPerLine; ++i) {
            if (b[i] <= prev || b[i] >= kPlaneSide)
                throw std::runtime_error(std::string("boundary CLT ") + dir + " line " +
                                         std::to_string(line) + " is not strictly increasing in 1..511");
            prev = b[i];
        }
    };
    for (int line = 0; line < kPlaneSide; ++line) {
        check_line(x_line(line), "x", line);
        check_line(y_line(line), "y", line);
    }
}

BoundaryClt decompose(const FullClt& clt) {
    BoundaryClt out;

    // Horizontal lines: the column component must step 0..22 left to right.
    for (int y = 0; y < kPlaneSide; ++y) {
        uint16_t* bounds = out.x_line(y);
        int expect = 0;
        int prev = clt.at(0, y) % kGridSide;
        if (prev != 0)
            throw NotSeparableError(NotSeparableError::Direction::X, y,
                                    "line y=" + std::to_string(y) +
                                        ": column component starts at " + std::to_string(prev));
        for (int x = 1; x < kPlaneSide; ++x) {
            const int col = clt.at(x, y) % kGridSide;
            if (col == prev) continue;
            if (col != prev + 1)
                throw NotSeparableError(NotSeparableError::Direction::X, y,
                                        "line y=" + std::to_string(y) + ": column component jumps " +
                                            std::to_string(prev) + "->" + std::to_string(col) +
                                            " at x=" + std::to_string(x));
            bounds[expect++] = static_cast<uint16_t>(x);
            prev = col;
        }
        if (prev != kGridSide - 1)
            throw NotSeparableError(NotSeparableError::Direction::X, y,
                                    "line y=" + std::to_string(y) + ": column component ends at " +
                                        std::to_string(prev) + ", expected 22");
    }

    // Vertical lines: the row component must step 0..22 top to bottom.
    for (int x = 0; x < kPlaneSide; ++x) {
        uint16_t* bounds = out.y_line(x);
        int expect = 0;
        int prev = clt.at(x, 0) / kGridSide;
        if (prev != 0)
            throw NotSeparableError(NotSeparableError::Direction::Y, x,
                                    "line x=" + std::to_string(x) + ": row component starts at " +
                                        std::to_string(prev));
        for (int y = 1; y < kPlaneSide; ++y) {
            const int row = clt.at(x, y) / kGridSide;
            if (row == prev) continue;
            if (row != prev + 1)
                throw NotSeparableError(NotSeparableError::Direction::Y, x,
                                        "line x=" + std::to_string(x) + ": row component jumps " +
                                            std::to_string(prev) + "->" + std::to_string(row) +
                                            " at y=" + std::to_string(y));
            bounds[expect++] = static_cast<uint16_t>(y);
            prev = row;
        }
        if (prev != kGridSide - 1)
            throw NotSeparableError(NotSeparableError::Direction::Y, x,
                                    "line x=" + std::to_string(x) + ": row component ends at " +
                                        std::to_string(prev) + ", expected 22");
    }

    return out;
}

FullClt make_uniform_grid_clt() {
    // Region edges: edge[j] = round(512*j/23), j = 0..23.
    uint32_t edges[kGridSide + 1];
    for (int j = 0; j <= kGridSide; ++j) edges[j] = div_round(kPlaneSide * j, kGridSide);

    FullClt clt;
    for (int y = 0; y < kPlaneSide; ++y) {
        int row = 0;
        while (uint32_t(y) >= edges[row + 1]) ++row;
        for (int x = 0; x < kPlaneSide; ++x) {
            int col = 0;
            while (uint32_t(x) >= edges[col + 1]) ++col;
            clt.at(x, y) = static_cast<uint16_t>(row * kGridSide + col);
        }
    }
    return clt;
}

MemoryFootprint footprint(unsigned n_bits, unsigned k_crystals) {
    if (n_bits < 1 || n_bits > 16) throw std::domain_error("n_bits must be in 1..16");
    const auto side = static_cast<unsigned>(std::lround(std::sqrt(double(k_crystals))));
    if (side * side != k_crystals || side < 2)
        throw std::domain_error("k_crystals must be a perfect square >= 4");

    const unsigned id_width = std::bit_width(k_crystals - 1);  // ceil(log2 k) for k not a power of two
    MemoryFootprint f;
    f.full_bits = (uint64_t(1) << (2 * n_bits)) * id_width;
    f.boundary_bits = 2ull * (uint64_t(1) << n_bits) * (side - 1) * n_bits;
    return f;
}

// --- file formats -----------------------------------------------------------
//
// Full CLT:     16-byte header (magic CLTF, version, n=9, k=529) followed by
//               262,144 u16 LE ids, row-major by y then x.
// Boundary CLT: header (magic CLTB) followed by the x-direction block
//               (512 lines x 22 u16 LE, indexed by y) then the y-direction
//               block (512 lines x 22 u16 LE, indexed by x). Values use 9
//               significant bits.

void FullClt::save(const std::string& path) const {
    TableFileHeader hdr;
    std::copy(std::begin(kFullMagic), std::end(kFullMagic), hdr.magic.begin());
    hdr.n_bits = 9;
    hdr.k = kCrystalCount;

    std::vector<uint8_t> bytes;
    bytes.reserve(TableFileHeader::kSize + cells_.size() * 2);
    auto h = hdr.to_bytes();
    bytes.insert(bytes.end(), h.begin(), h.end());
    for (uint16_t v : cells_) put_le16(bytes, v);
    write_file(path, bytes);
}

FullClt FullClt::load(const std::string& path) {
    const auto bytes = read_file(path);
    if (bytes.size() != TableFileHeader::kSize + size_t(kPlaneCells) * 2)
        throw std::runtime_error(path + ": wrong size for a full CLT file");
    const auto hdr = TableFileHeader::from_bytes(bytes);
    if (!std::equal(std::begin(kFullMagic), std::end(kFullMagic), hdr.magic.begin()))
        throw std::runtime_error(path + ": not a full CLT file");

    FullClt clt;
    const uint8_t* p = bytes.data() + TableFileHeader::kSize;
    for (int i = 0; i < kPlaneCells; ++i, p += 2) clt.cells_[i] = get_le16(p);
    clt.validate();
    return clt;
}

void BoundaryClt::save(const std::string& path) const {
    TableFileHeader hdr;
    std::copy(std::begin(kBoundaryMagic), std::end(kBoundaryMagic), hdr.magic.begin());
    hdr.n_bits = 9;
    hdr.k = kCrystalCount;

    std::vector<uint8_t> bytes;
    bytes.reserve(TableFileHeader::kSize + (x_bounds_.size() + y_bounds_.size()) * 2);
    auto h = hdr.to_bytes();
    bytes.insert(bytes.end(), h.begin(), h.end());
    for (uint16_t v : x_bounds_) put_le16(bytes, v);
    for (uint16_t v : y_bounds_) put_le16(bytes, v);
    write_file(path, bytes);
}

BoundaryClt BoundaryClt::load(const std::string& path) {
    const auto bytes = read_file(path);
    const size_t line_block = size_t(kPlaneSide) * kBoundariesPerLine;
    if (bytes.size() != TableFileHeader::kSize + 2 * line_block * 2)
        throw std::runtime_error(path + ": wrong size for a boundary CLT file");
    const auto hdr = TableFileHeader::from_bytes(bytes);
    if (!std::equal(std::begin(kBoundaryMagic), std::end(kBoundaryMagic), hdr.magic.begin()))
        throw std::runtime_error(path + ": not a boundary CLT file");

    BoundaryClt b;
    const uint8_t* p = bytes.data() + TableFileHeader::kSize;
    for (size_t i = 0; i < line_block; ++i, p += 2) b.x_bounds_[i] = get_le16(p);
    for (size_t i = 0; i < line_block; ++i, p += 2) b.y_bounds_[i] = get_le16(p);
    b.validate();
    return b;
}

}  // namespace petspu
