#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "petspu/events.hpp"

namespace petspu {

constexpr int kPlaneSide = 512;                          // 2^9 raw positions per axis
constexpr int kPlaneCells = kPlaneSide * kPlaneSide;     // 262,144
constexpr int kBoundariesPerLine = kGridSide - 1;        // 22

// Dense crystal look-up table: one crystal id per raw (x, y) cell.
class FullClt {
  public:
    FullClt() : cells_(kPlaneCells, 0) {}

    uint16_t& at(int x, int y) { return cells_[size_t(y) * kPlaneSide + x]; }
    uint16_t at(int x, int y) const { return cells_[size_t(y) * kPlaneSide + x]; }

    CrystalId lookup(RawPosition p) const { return CrystalId{at(p.x, p.y)}; }

    const std::vector<uint16_t>& cells() const { return cells_; }

    // All ids in range and every crystal covered at least once.
    void validate() const;

    void save(const std::string& path) const;
    static FullClt load(const std::string& path);

  private:
    std::vector<uint16_t> cells_;  // row-major by y then x
};

// Boundary-compressed CLT: per line, the 22 coordinates at which the
// crystal-id component of that direction increments. A stored boundary
// is the first coordinate belonging to the next region, so boundary
// values are >= 1 and strictly increasing along a line.
class BoundaryClt {
  public:
    BoundaryClt()
        : x_bounds_(size_t(kPlaneSide) * kBoundariesPerLine, 0),
          y_bounds_(size_t(kPlaneSide) * kBoundariesPerLine, 0) {}

    // x-direction boundaries of the horizontal line at raw y.
    uint16_t* x_line(int y) { return &x_bounds_[size_t(y) * kBoundariesPerLine]; }
    const uint16_t* x_line(int y) const { return &x_bounds_[size_t(y) * kBoundariesPerLine]; }

    // y-direction boundaries of the vertical line at raw x.
    uint16_t* y_line(int x) { return &y_bounds_[size_t(x) * kBoundariesPerLine]; }
    const uint16_t* y_line(int x) const { return &y_bounds_[size_t(x) * kBoundariesPerLine]; }

    // Compare the coordinate against the 22 boundaries of each direction
    // in parallel and popcount the hit mask, as the comparator bank does.
    CrystalId lookup(RawPosition p) const;

    void validate() const;  // monotone lines, boundaries >= 1

    void save(const std::string& path) const;
    static BoundaryClt load(const std::string& path);

    bool operator==(const BoundaryClt&) const = default;

  private:
    std::vector<uint16_t> x_bounds_;  // 512 lines x 22, indexed by y
    std::vector<uint16_t> y_bounds_;  // 512 lines x 22, indexed by x
};

// Raised when a dense CLT cannot be expressed in boundary form: some
// line's id component does not step 0,1,...,22 along the scan.
class NotSeparableError : public std::runtime_error {
  public:
    enum class Direction { X, Y };

    NotSeparableError(Direction dir, int line, const std::string& what)
        : std::runtime_error(what), direction(dir), line(line) {}

    Direction direction;
    int line;
};

// Three-stage conversion: id -> 2D components, per-line projection of the
// matching component, then transition extraction. The result reproduces
// full lookup at every raw position (throws NotSeparableError otherwise).
BoundaryClt decompose(const FullClt& clt);

// Reference CLT with crystal (i, j) covering the rectangle
// x in [round(512*j/23), round(512*(j+1)/23)), same in y.
FullClt make_uniform_grid_clt();

// Memory cost of dense versus boundary storage for an n-bit position and
// k-crystal (perfect square) block.
struct MemoryFootprint {
    uint64_t full_bits = 0;
    uint64_t boundary_bits = 0;

    double ratio() const { return double(full_bits) / double(boundary_bits); }
};

MemoryFootprint footprint(unsigned n_bits, unsigned k_crystals);

// Mb in all reporting means 2^20 bits.
inline double bits_to_mb(uint64_t bits) { return double(bits) / double(1u << 20); }

}  // namespace petspu
