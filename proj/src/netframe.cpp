#include "petspu/netframe.hpp"

#include <stdexcept>

#include "petspu/io_util.hpp"

namespace petspu {

namespace {

constexpr uint16_t kEthertypeIpv4 = 0x0800;
constexpr uint8_t kIpProtoUdp = 17;

struct Crc32Table {
    uint32_t entries[256];
    Crc32Table() {
        for (uint32_t i = 0; i < 256; ++i) {
            uint32_t c = i;
            for (int j = 0; j < 8; ++j) c = (c & 1) ? (c >> 1) ^ 0xEDB88320u : c >> 1;
            entries[i] = c;
        }
    }
};
const Crc32Table kCrcTable;

uint32_t add_fold(uint32_t sum, uint16_t word) {
    sum += word;
    return (sum & 0xffff) + (sum >> 16);
}

uint32_t sum_words(uint32_t sum, std::span<const uint8_t> bytes) {
    size_t i = 0;
    for (; i + 1 < bytes.size(); i += 2)
        sum = add_fold(sum, static_cast<uint16_t>((bytes[i] << 8) | bytes[i + 1]));
    if (i < bytes.size()) sum = add_fold(sum, static_cast<uint16_t>(bytes[i] << 8));
    return sum;
}

}  // namespace

uint16_t ip_checksum(std::span<const uint8_t> header) {
    return static_cast<uint16_t>(~sum_words(0, header) & 0xffff);
}

uint16_t udp_checksum(uint32_t src_ip, uint32_t dst_ip, std::span<const uint8_t> udp_segment) {
    uint32_t sum = 0;
    sum = add_fold(sum, static_cast<uint16_t>(src_ip >> 16));
    sum = add_fold(sum, static_cast<uint16_t>(src_ip & 0xffff));
    sum = add_fold(sum, static_cast<uint16_t>(dst_ip >> 16));
    sum = add_fold(sum, static_cast<uint16_t>(dst_ip & 0xffff));
    sum = add_fold(sum, kIpProtoUdp);
    sum = add_fold(sum, static_cast<uint16_t>(udp_segment.size()));
    sum = sum_words(sum, udp_segment);
    uint16_t ck = static_cast<uint16_t>(~sum & 0xffff);
    // RFC 768: a computed zero is transmitted as all ones.
    return ck == 0 ? 0xffff : ck;
}

uint32_t crc32(std::span<const uint8_t> bytes) {
    uint32_t c = 0xffffffffu;
    for (uint8_t b : bytes) c = kCrcTable.entries[(c ^ b) & 0xff] ^ (c >> 8);
    return c ^ 0xffffffffu;
}

std::vector<uint8_t> build_frame(std::span<const uint8_t> payload, const FrameAddress& addr,
                                 uint16_t ip_ident) {
    if (payload.size() > kMaxUdpPayload)
        throw std::length_error("UDP payload exceeds one Ethernet frame");

    const size_t udp_len = kUdpHeaderSize + payload.size();
    const size_t ip_len = kIpHeaderSize + udp_len;
    std::vector<uint8_t> f(kEthHeaderSize + ip_len);

    // Ethernet II
    std::copy(addr.dst_mac.begin(), addr.dst_mac.end(), f.begin());
    std::copy(addr.src_mac.begin(), addr.src_mac.end(), f.begin() + 6);
    put_be16(&f[12], kEthertypeIpv4);

    // IPv4, no options
    uint8_t* ip = &f[kEthHeaderSize];
    ip[0] = 0x45;  // version 4, IHL 5
    ip[1] = 0;
    put_be16(ip + 2, static_cast<uint16_t>(ip_len));
    put_be16(ip + 4, ip_ident);
    put_be16(ip + 6, 0x4000);  // don't fragment; the stack never fragments
    ip[8] = 64;                // TTL
    ip[9] = kIpProtoUdp;
    put_be16(ip + 10, 0);  // checksum placeholder
    put_be32(ip + 12, addr.src_ip);
    put_be32(ip + 16, addr.dst_ip);
    put_be16(ip + 10, ip_checksum({ip, kIpHeaderSize}));

    // UDP
    uint8_t* udp = ip + kIpHeaderSize;
    put_be16(udp, addr.src_port);
    put_be16(udp + 2, addr.dst_port);
    put_be16(udp + 4, static_cast<uint16_t>(udp_len));
    put_be16(udp + 6, 0);
    std::copy(payload.begin(), payload.end(), udp + kUdpHeaderSize);
    if (addr.udp_checksum) put_be16(udp + 6, udp_checksum(addr.src_ip, addr.dst_ip, {udp, udp_len}));

    return f;
}

std::variant<FrameError, ParsedFrame> parse_frame(std::span<const uint8_t> frame, bool has_fcs) {
    if (has_fcs) {
        if (frame.size() < 4) return FrameError::Truncated;
        const uint32_t want = get_le32(frame.data() + frame.size() - 4);
        if (crc32(frame.first(frame.size() - 4)) != want) return FrameError::BadFcs;
        frame = frame.first(frame.size() - 4);
    }

    if (frame.size() < kEthHeaderSize + kIpHeaderSize + kUdpHeaderSize) return FrameError::Truncated;
    if (get_be16(&frame[12]) != kEthertypeIpv4) return FrameError::BadEthertype;

    const uint8_t* ip = &frame[kEthHeaderSize];
    if (ip[0] != 0x45) return FrameError::BadIpHeader;
    if (ip[9] != kIpProtoUdp) return FrameError::BadIpHeader;
    // Header sums to 0xffff (checksum field included) when intact.
    if (sum_words(0, {ip, kIpHeaderSize}) != 0xffff) return FrameError::BadIpChecksum;

    const uint16_t ip_len = get_be16(ip + 2);
    if (ip_len < kIpHeaderSize + kUdpHeaderSize) return FrameError::BadLength;
    if (frame.size() != kEthHeaderSize + ip_len) return FrameError::BadLength;

    const uint8_t* udp = ip + kIpHeaderSize;
    const uint16_t udp_len = get_be16(udp + 4);
    if (udp_len != ip_len - kIpHeaderSize) return FrameError::UdpLengthMismatch;

    ParsedFrame out;
    out.addr.src_ip = get_be32(ip + 12);
    out.addr.dst_ip = get_be32(ip + 16);
    std::copy(frame.begin(), frame.begin() + 6, out.addr.dst_mac.begin());
    std::copy(frame.begin() + 6, frame.begin() + 12, out.addr.src_mac.begin());
    out.addr.src_port = get_be16(udp);
    out.addr.dst_port = get_be16(udp + 2);

    const uint16_t udp_ck = get_be16(udp + 6);
    out.addr.udp_checksum = udp_ck != 0;
    if (udp_ck != 0) {
        // Verify with the field zeroed, as the sender computed it.
        std::vector<uint8_t> seg(udp, udp + udp_len);
        seg[6] = seg[7] = 0;
        if (udp_checksum(out.addr.src_ip, out.addr.dst_ip, seg) != udp_ck)
            return FrameError::BadUdpChecksum;
    }

    out.payload.assign(udp + kUdpHeaderSize, udp + udp_len);
    return out;
}

const char* frame_error_name(FrameError e) {
    switch (e) {
        case FrameError::Truncated: return "truncated";
        case FrameError::BadEthertype: return "bad ethertype";
        case FrameError::BadIpHeader: return "bad ip header";
        case FrameError::BadIpChecksum: return "bad ip checksum";
        case FrameError::BadLength: return "bad length";
        case FrameError::UdpLengthMismatch: return "udp length mismatch";
        case FrameError::BadUdpChecksum: return "bad udp checksum";
        case FrameError::BadFcs: return "bad fcs";
    }
    return "unknown";
}

FrameFileWriter::FrameFileWriter(std::string path, FrameAddress addr)
    : path_(std::move(path)), addr_(addr) {}

void FrameFileWriter::write_payload(std::span<const uint8_t> payload) {
    if (!open_) throw std::logic_error("frame file writer already closed");
    auto frame = build_frame(payload, addr_, next_ident_++);
    const uint32_t fcs = crc32(frame);
    put_le32(frame, fcs);
    put_le32(buffer_, static_cast<uint32_t>(frame.size()));
    buffer_.insert(buffer_.end(), frame.begin(), frame.end());
    ++frames_;
}

void FrameFileWriter::close() {
    if (!open_) return;
    write_file(path_, buffer_);
    buffer_.clear();
    open_ = false;
}

std::vector<std::vector<uint8_t>> read_frame_file(const std::string& path) {
    const auto bytes = read_file(path);
    std::vector<std::vector<uint8_t>> payloads;
    size_t off = 0;
    while (off < bytes.size()) {
        if (off + 4 > bytes.size()) throw std::runtime_error(path + ": truncated frame length");
        const uint32_t len = get_le32(&bytes[off]);
        off += 4;
        if (off + len > bytes.size()) throw std::runtime_error(path + ": truncated frame");
        auto parsed = parse_frame({&bytes[off], len}, /*has_fcs=*/true);
        if (auto* err = std::get_if<FrameError>(&parsed))
            throw std::runtime_error(path + ": frame " + std::to_string(payloads.size()) + ": " +
                                     frame_error_name(*err));
        payloads.push_back(std::move(std::get<ParsedFrame>(parsed).payload));
        off += len;
    }
    return payloads;
}

}  // namespace petspu
