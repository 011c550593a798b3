#pragma once

#include <deque>
#include <memory>
#include <span>
#include <vector>

#include "petspu/command.hpp"
#include "petspu/netframe.hpp"
#include "petspu/pipeline.hpp"

namespace petspu {

// Whole 16-byte packets per datagram: 92 x 16 = 1472 bytes, one MTU.
// An event never spans two datagrams.
constexpr size_t kPacketsPerDatagram = kMaxUdpPayload / 16;
constexpr size_t kHistChunkBins = 512;

// One singles processing unit: four block pipelines, the token-ring
// readout, uplink batching and the downlink command surface.
//
// Externally synchronized: one driver thread calls ingest / pump_uplink /
// handle_downlink. Commands handled between ingest calls land on event
// boundaries; configuration changes swap a complete snapshot.
class Spu {
  public:
    explicit Spu(SpuConfig cfg);

    Disposition ingest(const RawEvent& ev);

    // Moves ready uplink datagram payloads into `out`: pending histogram
    // chunks and status reports first, then batches of up to 92 packets
    // drained through the token ring. Returns the number appended.
    size_t pump_uplink(std::vector<std::vector<uint8_t>>& out,
                       size_t max_datagrams = size_t(-1));

    void handle_downlink(std::span<const uint8_t> datagram);

    const SpuConfig& config() const { return *cfg_; }
    void set_config(SpuConfig cfg) { cfg_ = std::make_shared<const SpuConfig>(std::move(cfg)); }

    const BlockCounters& counters(int block) const { return counters_[block]; }
    BlockHistogram& histogram(int block) { return hists_[block]; }
    const BlockFifo& fifo(int block) const { return fifos_[block]; }
    uint64_t nak_count() const { return naks_; }
    bool uplink_idle() const;

  private:
    void apply_command(const Command& cmd, std::shared_ptr<SpuConfig>& staged);
    void queue_hist_readout(int block);
    void queue_status();

    std::shared_ptr<const SpuConfig> cfg_;
    std::array<BlockFifo, kBlocksPerModule> fifos_;
    std::array<BlockHistogram, kBlocksPerModule> hists_;
    std::array<BlockCounters, kBlocksPerModule> counters_{};
    TokenRing ring_;
    std::deque<std::vector<uint8_t>> control_out_;
    uint64_t naks_ = 0;
};

}  // namespace petspu
