#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "petspu/histogram.hpp"
#include "petspu/packet.hpp"

namespace petspu {

// Host-side bookkeeping for one receive session. Counters only grow.
struct SessionStats {
    struct PerBlock {
        uint64_t regular = 0;
        uint64_t flood_raw = 0;
        uint64_t energy_raw = 0;
    };

    uint64_t datagrams = 0;
    uint64_t packets = 0;
    uint64_t decode_errors = 0;
    uint64_t length_errors = 0;   // trailing bytes that are not a whole packet
    uint64_t chunk_errors = 0;
    std::array<std::array<PerBlock, kBlocksPerModule>, kModulesPerRing> per_block{};
};

// Reassembles one block's histogram readout from its chunk stream.
struct ChunkAssembly {
    std::vector<uint16_t> bins;
    uint16_t next_index = 0;
    bool complete = false;
    uint32_t gaps = 0;  // out-of-order or missing chunks
};

// The receiving end of the uplink: splits datagrams into packets, decodes
// them, reassembles histogram readouts, and accumulates the offline-mode
// histograms with unbounded 64-bit counters (no hardware RAM ceiling).
class DaqHost {
  public:
    void ingest_datagram(std::span<const uint8_t> payload);

    const SessionStats& stats() const { return stats_; }
    const std::vector<SinglesRecord>& regular_records() const { return regular_; }
    const std::vector<FloodRawRecord>& flood_records() const { return flood_; }
    const std::vector<EnergyRawRecord>& energy_records() const { return energy_; }
    const ChunkAssembly& assembly(int block) const { return assemblies_[block]; }
    const std::optional<StatusReport>& status(int block) const { return status_[block]; }

    // Offline histograms, built on the PC side; same address mapping as
    // the online module but without the 10-bit saturation.
    std::vector<uint64_t> build_offline_flood(int block) const;
    std::vector<uint64_t> build_offline_spectra(int block, unsigned scale_shift) const;

    void clear_records();

  private:
    SessionStats stats_;
    std::vector<SinglesRecord> regular_;
    std::vector<FloodRawRecord> flood_;
    std::vector<EnergyRawRecord> energy_;
    std::array<ChunkAssembly, kBlocksPerModule> assemblies_;
    std::array<std::optional<StatusReport>, kBlocksPerModule> status_;
};

// Flood image as binary PGM: "P5\n512 512\n<maxval>\n" followed by the
// raster, two bytes per sample (big-endian) once maxval exceeds 255.
// maxval is the observed maximum count (at least 1, clamped to 65535).
void write_flood_pgm(const std::string& path, std::span<const uint64_t> bins);
void write_flood_pgm(const std::string& path, std::span<const uint16_t> bins);

// Spectra as CSV rows "crystal_id,bin,count", all 529 x 256 rows, no header.
void write_spectra_csv(const std::string& path, std::span<const uint64_t> bins);
void write_spectra_csv(const std::string& path, std::span<const uint16_t> bins);

void write_stats_json(const std::string& path, const SessionStats& stats);

}  // namespace petspu
