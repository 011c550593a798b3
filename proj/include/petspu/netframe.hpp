#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace petspu {

// Simplified UDP/IPv4/Ethernet-II stack: enough framing for the uplink
// and downlink datagrams, nothing else (no ARP, ICMP, fragmentation or
// retransmission). In live socket mode the platform stack provides the
// physical framing; the byte-exact builder below serves golden tests and
// offline frame-capture files.

constexpr size_t kEthHeaderSize = 14;
constexpr size_t kIpHeaderSize = 20;  // no options
constexpr size_t kUdpHeaderSize = 8;
constexpr size_t kMaxUdpPayload = 1472;  // 1500 MTU - 20 IP - 8 UDP

using MacAddr = std::array<uint8_t, 6>;

struct FrameAddress {
    MacAddr dst_mac{{0x02, 0x44, 0x41, 0x51, 0x00, 0x01}};
    MacAddr src_mac{{0x02, 0x53, 0x50, 0x55, 0x00, 0x01}};
    uint32_t src_ip = 0xc0a8010a;  // 192.168.1.10
    uint32_t dst_ip = 0xc0a80101;  // 192.168.1.1
    uint16_t src_port = 5000;
    uint16_t dst_port = 5000;
    bool udp_checksum = true;  // when false the UDP checksum field is 0
};

// Ones'-complement sum of 16-bit words (odd trailing byte padded with
// zero), folded per addition; returns the complemented checksum.
uint16_t ip_checksum(std::span<const uint8_t> header);

// UDP checksum over the IPv4 pseudo-header plus UDP header and payload.
uint16_t udp_checksum(uint32_t src_ip, uint32_t dst_ip, std::span<const uint8_t> udp_segment);

// IEEE 802.3 frame check sequence (reflected CRC-32, polynomial
// 0x04C11DB7, init and final xor 0xFFFFFFFF). Table-driven.
uint32_t crc32(std::span<const uint8_t> bytes);

std::vector<uint8_t> build_frame(std::span<const uint8_t> payload, const FrameAddress& addr,
                                 uint16_t ip_ident = 0);

enum class FrameError : uint8_t {
    Truncated,          // too short for the declared layering
    BadEthertype,       // not IPv4
    BadIpHeader,        // wrong version or header length
    BadIpChecksum,
    BadLength,          // IPv4 total length inconsistent with the frame
    UdpLengthMismatch,  // UDP length field inconsistent
    BadUdpChecksum,
    BadFcs,             // frame check sequence mismatch (frame files)
};

const char* frame_error_name(FrameError e);

struct ParsedFrame {
    FrameAddress addr;
    std::vector<uint8_t> payload;
};

// Validates and strips the three layers in reverse. `has_fcs` selects the
// offline frame-file form with a trailing CRC-32.
std::variant<FrameError, ParsedFrame> parse_frame(std::span<const uint8_t> frame,
                                                  bool has_fcs = false);

// Offline capture files: repeated [u32 LE frame length][frame bytes],
// each frame carrying its 4-byte FCS.
class FrameFileWriter {
  public:
    FrameFileWriter(std::string path, FrameAddress addr);

    void write_payload(std::span<const uint8_t> payload);
    void close();  // flushes; writer unusable afterwards

    size_t frames_written() const { return frames_; }

  private:
    std::string path_;
    FrameAddress addr_;
    std::vector<uint8_t> buffer_;
    uint16_t next_ident_ = 0;
    size_t frames_ = 0;
    bool open_ = true;
};

// Reads a capture file back, validating every frame; returns payloads in
// file order. Throws on malformed files.
std::vector<std::vector<uint8_t>> read_frame_file(const std::string& path);

}  // namespace petspu
