#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <vector>

#include "petspu/crystal_lut.hpp"
#include "petspu/events.hpp"

namespace petspu {

enum class HistMode : uint8_t {
    Flood = 0,           // 512x512 raw positions
    EnergySpectrum = 1,  // 529 crystals x 256 energy bins
};

enum class AccumResult : uint8_t {
    Accepted,      // counter incremented
    Terminated,    // counter already at ceiling: full flag set, session over
    NotActive,     // no session running
    AddressError,  // address out of range for the current mode
};

// Per-block histogram RAM: 262,144 counters of 10 bits, shared between
// flood and energy-spectrum sessions through the mode mux. Energy
// sessions address only the first 529*256 = 135,424 counters. A counter
// hitting the 1023 ceiling terminates the session; it never wraps.
class BlockHistogram {
  public:
    static constexpr uint32_t kFloodBins = kPlaneCells;                     // 262,144
    static constexpr uint32_t kEnergyBins = kCrystalCount * 256;            // 135,424
    static constexpr uint16_t kCounterMax = 1023;
    static constexpr unsigned kCounterBits = 10;

    BlockHistogram() : bins_(kFloodBins, 0) { live_buffers_.fetch_add(1, std::memory_order_relaxed); }
    ~BlockHistogram() { live_buffers_.fetch_sub(1, std::memory_order_relaxed); }

    BlockHistogram(const BlockHistogram&) = delete;
    BlockHistogram& operator=(const BlockHistogram&) = delete;

    // Zeroes the whole buffer, clears the full flag and arms accumulation.
    // Returns false when a session is already active.
    [[nodiscard]] bool start(HistMode mode) {
        if (active_) return false;
        std::fill(bins_.begin(), bins_.end(), uint16_t(0));
        mode_ = mode;
        full_ = false;
        active_ = true;
        return true;
    }

    AccumResult accumulate(uint32_t addr) {
        if (!active_) return AccumResult::NotActive;
        if (addr >= size()) return AccumResult::AddressError;
        if (bins_[addr] >= kCounterMax) {
            full_ = true;
            active_ = false;
            return AccumResult::Terminated;
        }
        ++bins_[addr];
        return AccumResult::Accepted;
    }

    // Disarm without clearing counters; a later start() zeroes them.
    void reset() {
        active_ = false;
        full_ = false;
    }

    // Counters in ascending address order; length depends on the mode.
    std::span<const uint16_t> read() const { return {bins_.data(), size()}; }

    uint32_t size() const { return mode_ == HistMode::Flood ? kFloodBins : kEnergyBins; }
    HistMode mode() const { return mode_; }
    bool active() const { return active_; }
    bool full() const { return full_; }

    static uint32_t flood_addr(RawPosition p) { return uint32_t(p.y) * kPlaneSide + p.x; }

    // Energy bin is the raw (uncorrected) sum right-shifted, clamped to 255:
    // the spectrum exists to locate the photopeak before any correction.
    static uint32_t energy_addr(CrystalId id, uint32_t raw_energy, unsigned scale_shift) {
        uint32_t bin = raw_energy >> scale_shift;
        if (bin > 255) bin = 255;
        return uint32_t(id.id) * 256 + bin;
    }

    // Accounting hook: number of histogram buffers currently allocated.
    // One per block; mode switching must not allocate a second one.
    static int live_buffer_count() { return live_buffers_.load(std::memory_order_relaxed); }

    // Theoretical RAM cost, in bits, of the two session kinds per block.
    static constexpr uint64_t flood_bits_per_block() { return uint64_t(kFloodBins) * kCounterBits; }
    static constexpr uint64_t energy_bits_per_block() { return uint64_t(kEnergyBins) * kCounterBits; }

  private:
    std::vector<uint16_t> bins_;
    HistMode mode_ = HistMode::Flood;
    bool active_ = false;
    bool full_ = false;

    static std::atomic<int> live_buffers_;
};

}  // namespace petspu
