#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <optional>

#include "petspu/corrections.hpp"
#include "petspu/counters.hpp"
#include "petspu/crystal_lut.hpp"
#include "petspu/events.hpp"
#include "petspu/histogram.hpp"
#include "petspu/packet.hpp"
#include "petspu/positioning.hpp"

namespace petspu {

// Processing modes, exactly one active per SPU; switches take effect at
// event boundaries.
enum class Mode : uint8_t {
    RegularPackage = 0,
    FloodOnline = 1,
    FloodOffline = 2,
    EnergyOnline = 3,
    EnergyOffline = 4,
};

// What became of one ingested event. HistTerminated covers every event an
// online mode could not accumulate: the one that hit the counter ceiling
// and any that arrive while no session is armed.
enum class Disposition : uint8_t {
    Packaged,
    WindowRejected,
    Histogrammed,
    HistTerminated,
    ZeroSumRejected,
    ClockUnderflow,
    FifoDropped,
};

const char* disposition_name(Disposition d);

// Single-producer single-consumer ring of encoded packets, capacity 512.
// A push onto a full ring drops the incoming packet (newest) and counts
// it, keeping older queued events and their time order intact.
class BlockFifo {
  public:
    static constexpr size_t kCapacity = 512;

    bool push(const PacketBytes& p) {
        const uint64_t head = head_.load(std::memory_order_relaxed);
        if (head - tail_.load(std::memory_order_acquire) >= kCapacity) {
            drops_.fetch_add(1, std::memory_order_relaxed);
            return false;
        }
        slots_[head % kCapacity] = p;
        head_.store(head + 1, std::memory_order_release);
        return true;
    }

    bool pop(PacketBytes& out) {
        const uint64_t tail = tail_.load(std::memory_order_relaxed);
        if (head_.load(std::memory_order_acquire) == tail) return false;
        out = slots_[tail % kCapacity];
        tail_.store(tail + 1, std::memory_order_release);
        return true;
    }

    bool empty() const {
        return head_.load(std::memory_order_acquire) == tail_.load(std::memory_order_acquire);
    }

    size_t size() const {
        return size_t(head_.load(std::memory_order_acquire) - tail_.load(std::memory_order_acquire));
    }

    uint64_t drop_count() const { return drops_.load(std::memory_order_relaxed); }

  private:
    std::array<PacketBytes, kCapacity> slots_{};
    std::atomic<uint64_t> head_{0};
    std::atomic<uint64_t> tail_{0};
    std::atomic<uint64_t> drops_{0};
};

// Rotating-grant round-robin over the four block FIFOs. One packet per
// grant; the token moves to the slot after the serviced block, which is
// what bounds any block's wait to three foreign grants per own grant.
class TokenRing {
  public:
    std::optional<std::pair<int, PacketBytes>> arbitrate(std::array<BlockFifo, 4>& fifos) {
        for (int i = 0; i < 4; ++i) {
            const int block = (token_ + i) % 4;
            PacketBytes p;
            if (fifos[block].pop(p)) {
                token_ = uint8_t((block + 1) % 4);
                return std::make_pair(block, p);
            }
        }
        return std::nullopt;
    }

    uint8_t token() const { return token_; }

  private:
    uint8_t token_ = 0;
};

struct BlockConfig {
    BoundaryClt clt;
    PeakLut peaks;
    TimeOffsetLut times;
};

struct SpuConfig {
    uint8_t module_id = 0;
    Mode mode = Mode::RegularPackage;
    EnergyWindow window;
    uint8_t energy_shift = 4;  // raw-sum right shift for spectrum binning, 0..11
    End2YPair y_pair = End2YPair::CrossedCd;
    std::array<BlockConfig, kBlocksPerModule> blocks;
};

// The per-block regular-mode dataflow plus the mode dispatch. Hot path:
// runs in the block's own execution context, one call per event.
inline Disposition process_event(const RawEvent& ev, const SpuConfig& cfg, BlockFifo& fifo,
                                 BlockHistogram& hist, BlockCounters& n) {
    ++n.ingested;

    const auto posr = compute_position(ev.integrals, cfg.y_pair);
    if (!posr) {
        ++n.zero_sum;
        return Disposition::ZeroSumRejected;
    }
    const BlockConfig& bc = cfg.blocks[ev.block_id];

    switch (cfg.mode) {
        case Mode::RegularPackage: {
            const CrystalId id = bc.clt.lookup(posr->pos);
            const auto time = correct_time(ev.tdc_time_ps, id, bc.times);
            if (!time) {
                ++n.underflow;
                return Disposition::ClockUnderflow;
            }
            const uint32_t raw = sum_energy(ev.integrals);
            const uint16_t kev = correct_energy(raw, id, bc.peaks);
            if (!pass_window(kev, cfg.window)) {
                ++n.window_rejected;
                return Disposition::WindowRejected;
            }
            const SinglesRecord rec{ev.module_id, ev.block_id, id, posr->doi, kev, *time};
            if (!fifo.push(encode_packet(rec))) {
                ++n.dropped;
                return Disposition::FifoDropped;
            }
            ++n.packaged;
            return Disposition::Packaged;
        }
        case Mode::FloodOnline: {
            const auto r = hist.accumulate(BlockHistogram::flood_addr(posr->pos));
            if (r == AccumResult::Accepted) {
                ++n.histogrammed;
                return Disposition::Histogrammed;
            }
            ++n.hist_terminated;
            return Disposition::HistTerminated;
        }
        case Mode::EnergyOnline: {
            const CrystalId id = bc.clt.lookup(posr->pos);
            const uint32_t addr =
                BlockHistogram::energy_addr(id, sum_energy(ev.integrals), cfg.energy_shift);
            const auto r = hist.accumulate(addr);
            if (r == AccumResult::Accepted) {
                ++n.histogrammed;
                return Disposition::Histogrammed;
            }
            ++n.hist_terminated;
            return Disposition::HistTerminated;
        }
        case Mode::FloodOffline: {
            const FloodRawRecord rec{ev.module_id, ev.block_id, posr->pos, ev.tdc_time_ps};
            if (!fifo.push(encode_packet(rec))) {
                ++n.dropped;
                return Disposition::FifoDropped;
            }
            ++n.packaged;
            return Disposition::Packaged;
        }
        case Mode::EnergyOffline: {
            const CrystalId id = bc.clt.lookup(posr->pos);
            const EnergyRawRecord rec{ev.module_id, ev.block_id,        id,
                                      posr->doi,    sum_energy(ev.integrals), ev.tdc_time_ps};
            if (!fifo.push(encode_packet(rec))) {
                ++n.dropped;
                return Disposition::FifoDropped;
            }
            ++n.packaged;
            return Disposition::Packaged;
        }
    }
    return Disposition::ZeroSumRejected;  // unreachable
}

// A complete default configuration: uniform-grid CLT, flat peak LUT at
// 1000, zero time offsets, [350, 650] keV window.
SpuConfig make_default_config(uint8_t module_id = 0);

}  // namespace petspu
