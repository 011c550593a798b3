#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "petspu/counters.hpp"
#include "petspu/events.hpp"

namespace petspu {

// Uplink record types. A datagram is homogeneous: a run of 16-byte event
// packets (first byte 0x01..0x03), one histogram chunk (0x10), or one
// status report (0x11).
enum class PacketType : uint8_t {
    Regular = 0x01,     // crystal id, DOI, corrected energy, corrected time
    FloodRaw = 0x02,    // raw (x, y), for host-side flood histogramming
    EnergyRaw = 0x03,   // crystal id, uncorrected energy sum
    HistChunk = 0x10,
    Status = 0x11,
};

using PacketBytes = std::array<uint8_t, 16>;

// 16-byte event packet, multi-byte fields in network byte order:
//   byte 0      packet type
//   byte 1      module_id[7:4] block_id[3:2] reserved[1:0]=0
//   bytes 2-3   crystal id (0x01/0x03) or raw x (0x02)
//   byte 4      0x01: doi[7:4], reserved[3:0]=0
//               0x02: raw y bit 8
//               0x03: doi[7:4], reserved[3]=0, raw energy bits 18..16
//   bytes 5-6   0x01: corrected energy / keV
//               0x02: raw y bits 7..0, then reserved=0
//               0x03: raw energy bits 15..0
//   bytes 7-14  time / ps (0x01: offset-corrected; 0x02/0x03: raw TDC)
//   byte 15     reserved = 0
//
// Reserved fields must be zero; decode rejects anything else.

struct FloodRawRecord {
    uint8_t module_id = 0;
    uint8_t block_id = 0;
    RawPosition pos;
    uint64_t time_ps = 0;

    bool operator==(const FloodRawRecord&) const = default;
};

struct EnergyRawRecord {
    uint8_t module_id = 0;
    uint8_t block_id = 0;
    CrystalId crystal;
    Doi doi;
    uint32_t raw_energy = 0;  // 19 bits
    uint64_t time_ps = 0;

    bool operator==(const EnergyRawRecord&) const = default;
};

PacketBytes encode_packet(const SinglesRecord& r);
PacketBytes encode_packet(const FloodRawRecord& r);
PacketBytes encode_packet(const EnergyRawRecord& r);

enum class PacketDecodeError : uint8_t {
    BadLength,
    BadType,
    ReservedBitsSet,
    BadCrystalId,
    BadPosition,
};

using PacketDecodeResult =
    std::variant<PacketDecodeError, SinglesRecord, FloodRawRecord, EnergyRawRecord>;

PacketDecodeResult decode_packet(std::span<const uint8_t> bytes);

// Histogram readout chunk:
//   0x10, block_id u8, chunk_index u16 LE, count u16 LE, count x u16 LE bins.
// Chunks carry ascending addresses; a final chunk with count 0 marks the
// end of one block's readout.
struct HistChunk {
    uint8_t block_id = 0;
    uint16_t chunk_index = 0;
    std::vector<uint16_t> bins;

    bool end_of_readout() const { return bins.empty(); }
};

std::vector<uint8_t> encode_hist_chunk(uint8_t block_id, uint16_t chunk_index,
                                       std::span<const uint16_t> bins);
std::variant<PacketDecodeError, HistChunk> decode_hist_chunk(std::span<const uint8_t> bytes);

// Status report:
//   0x11, module_id u8, block_id u8, reserved u8, then the eight block
//   counters as u64 LE in declaration order.
struct StatusReport {
    uint8_t module_id = 0;
    uint8_t block_id = 0;
    BlockCounters counters;
};

std::vector<uint8_t> encode_status(uint8_t module_id, uint8_t block_id, const BlockCounters& c);
std::variant<PacketDecodeError, StatusReport> decode_status(std::span<const uint8_t> bytes);

}  // namespace petspu
