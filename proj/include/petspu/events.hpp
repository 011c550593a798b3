#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace petspu {

// One dual-ended detector block: 23x23 crystals read out by four SiPM
// channels per end (A..D), eight area integrals per event.
constexpr int kGridSide = 23;
constexpr int kCrystalCount = kGridSide * kGridSide;  // 529
constexpr int kBlocksPerModule = 4;
constexpr int kModulesPerRing = 12;

struct ChannelIntegrals {
    uint16_t a1 = 0, b1 = 0, c1 = 0, d1 = 0;
    uint16_t a2 = 0, b2 = 0, c2 = 0, d2 = 0;

    uint32_t sum1() const { return uint32_t(a1) + b1 + c1 + d1; }
    uint32_t sum2() const { return uint32_t(a2) + b2 + c2 + d2; }
    uint32_t sum() const { return sum1() + sum2(); }  // max 524,280, fits 19 bits

    bool operator==(const ChannelIntegrals&) const = default;
};

// Quantized 9-bit position on the 512x512 flood plane.
struct RawPosition {
    uint16_t x = 0;  // 0..511
    uint16_t y = 0;  // 0..511

    bool operator==(const RawPosition&) const = default;
};

// 4-bit depth-of-interaction code.
struct Doi {
    uint8_t value = 0;  // 0..15

    bool operator==(const Doi&) const = default;
};

struct Crystal2d {
    uint8_t row = 0;  // 0..22
    uint8_t col = 0;  // 0..22

    bool operator==(const Crystal2d&) const = default;
};

// Row-major index into the 23x23 crystal array: id = row*23 + col.
struct CrystalId {
    uint16_t id = 0;  // 0..528

    bool operator==(const CrystalId&) const = default;
};

inline Crystal2d crystal_id_to_2d(CrystalId c) {
    if (c.id >= kCrystalCount)
        throw std::out_of_range("crystal id " + std::to_string(c.id) + " out of range");
    return Crystal2d{static_cast<uint8_t>(c.id / kGridSide), static_cast<uint8_t>(c.id % kGridSide)};
}

inline CrystalId crystal_2d_to_id(uint8_t row, uint8_t col) {
    if (row >= kGridSide || col >= kGridSide)
        throw std::out_of_range("crystal (row,col) out of range");
    return CrystalId{static_cast<uint16_t>(row * kGridSide + col)};
}

// One event as delivered by the area-integral logic plus the TDC.
struct RawEvent {
    uint8_t module_id = 0;  // 0..11
    uint8_t block_id = 0;   // 0..3
    ChannelIntegrals integrals;
    uint64_t tdc_time_ps = 0;

    bool operator==(const RawEvent&) const = default;
};

// Fully processed single, ready for packaging.
struct SinglesRecord {
    uint8_t module_id = 0;
    uint8_t block_id = 0;
    CrystalId crystal;
    Doi doi;
    uint16_t energy_kev = 0;
    uint64_t time_ps = 0;

    bool operator==(const SinglesRecord&) const = default;
};

// Event files: flat little-endian records, 26 bytes each:
// module_id u8, block_id u8, a1..d1 a2..d2 u16, tdc_time_ps u64.
constexpr size_t kEventRecordSize = 26;

void write_events(const std::string& path, const std::vector<RawEvent>& events);
std::vector<RawEvent> read_events(const std::string& path);

}  // namespace petspu
