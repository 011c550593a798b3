#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "petspu/events.hpp"
#include "petspu/io_util.hpp"

namespace petspu {

// Measured photopeak position of each crystal, in raw area-integral units.
// Entries must be nonzero; enforced at load time.
struct PeakLut {
    std::array<uint16_t, kCrystalCount> peaks;

    PeakLut() { peaks.fill(1); }

    void validate() const;
    void save(const std::string& path) const;
    static PeakLut load(const std::string& path);

    bool operator==(const PeakLut&) const = default;
};

// Per-crystal timing offset, picoseconds, added to the TDC result.
struct TimeOffsetLut {
    std::array<int32_t, kCrystalCount> offsets{};

    void save(const std::string& path) const;
    static TimeOffsetLut load(const std::string& path);

    bool operator==(const TimeOffsetLut&) const = default;
};

struct EnergyWindow {
    uint16_t low_kev = 350;
    uint16_t high_kev = 650;

    bool operator==(const EnergyWindow&) const = default;
};

// The eight signals summed; 19-bit result, cannot overflow.
inline uint32_t sum_energy(const ChannelIntegrals& ch) { return ch.sum(); }

// Rescale so that this crystal's photopeak lands at exactly 511 keV.
// Round-half-up, saturating at the 16-bit ceiling.
inline uint16_t correct_energy(uint32_t raw_energy, CrystalId id, const PeakLut& lut) {
    const uint64_t kev = scale_round(raw_energy, lut.peaks[id.id], 511);
    return kev > 0xffff ? 0xffff : static_cast<uint16_t>(kev);
}

// Apply the crystal's timing offset. nullopt when the corrected clock
// would go negative; such events are discarded and counted upstream.
inline std::optional<uint64_t> correct_time(uint64_t time_ps, CrystalId id,
                                            const TimeOffsetLut& lut) {
    const int32_t off = lut.offsets[id.id];
    if (off < 0 && uint64_t(-int64_t(off)) > time_ps) return std::nullopt;
    return time_ps + uint64_t(int64_t(off));
}

// Inclusive on both ends.
inline bool pass_window(uint16_t energy_kev, EnergyWindow w) {
    return energy_kev >= w.low_kev && energy_kev <= w.high_kev;
}

}  // namespace petspu
