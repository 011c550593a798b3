#include "petspu/packet.hpp"

#include "petspu/crystal_lut.hpp"
#include "petspu/io_util.hpp"

namespace petspu {

namespace {

uint8_t addressing_byte(uint8_t module_id, uint8_t block_id) {
    return static_cast<uint8_t>((module_id << 4) | ((block_id & 0x3) << 2));
}

}  // namespace

PacketBytes encode_packet(const SinglesRecord& r) {
    PacketBytes p{};
    p[0] = static_cast<uint8_t>(PacketType::Regular);
    p[1] = addressing_byte(r.module_id, r.block_id);
    put_be16(&p[2], r.crystal.id);
    p[4] = static_cast<uint8_t>(r.doi.value << 4);
    put_be16(&p[5], r.energy_kev);
    put_be64(&p[7], r.time_ps);
    return p;
}

PacketBytes encode_packet(const FloodRawRecord& r) {
    PacketBytes p{};
    p[0] = static_cast<uint8_t>(PacketType::FloodRaw);
    p[1] = addressing_byte(r.module_id, r.block_id);
    put_be16(&p[2], r.pos.x);
    p[4] = static_cast<uint8_t>(r.pos.y >> 8);
    p[5] = static_cast<uint8_t>(r.pos.y & 0xff);
    put_be64(&p[7], r.time_ps);
    return p;
}

PacketBytes encode_packet(const EnergyRawRecord& r) {
    PacketBytes p{};
    p[0] = static_cast<uint8_t>(PacketType::EnergyRaw);
    p[1] = addressing_byte(r.module_id, r.block_id);
    put_be16(&p[2], r.crystal.id);
    p[4] = static_cast<uint8_t>((r.doi.value << 4) | ((r.raw_energy >> 16) & 0x7));
    put_be16(&p[5], static_cast<uint16_t>(r.raw_energy & 0xffff));
    put_be64(&p[7], r.time_ps);
    return p;
}

PacketDecodeResult decode_packet(std::span<const uint8_t> b) {
    if (b.size() != 16) return PacketDecodeError::BadLength;
    if ((b[1] & 0x03) != 0 || b[15] != 0) return PacketDecodeError::ReservedBitsSet;

    const uint8_t module_id = b[1] >> 4;
    const uint8_t block_id = (b[1] >> 2) & 0x3;
    if (module_id >= kModulesPerRing) return PacketDecodeError::ReservedBitsSet;
    const uint64_t time_ps = get_be64(&b[7]);

    switch (b[0]) {
        case static_cast<uint8_t>(PacketType::Regular): {
            if ((b[4] & 0x0f) != 0) return PacketDecodeError::ReservedBitsSet;
            SinglesRecord r;
            r.module_id = module_id;
            r.block_id = block_id;
            r.crystal.id = get_be16(&b[2]);
            if (r.crystal.id >= kCrystalCount) return PacketDecodeError::BadCrystalId;
            r.doi.value = b[4] >> 4;
            r.energy_kev = get_be16(&b[5]);
            r.time_ps = time_ps;
            return r;
        }
        case static_cast<uint8_t>(PacketType::FloodRaw): {
            if ((b[4] & 0xfe) != 0 || b[6] != 0) return PacketDecodeError::ReservedBitsSet;
            FloodRawRecord r;
            r.module_id = module_id;
            r.block_id = block_id;
            r.pos.x = get_be16(&b[2]);
            r.pos.y = static_cast<uint16_t>((uint16_t(b[4]) << 8) | b[5]);
            if (r.pos.x >= kPlaneSide || r.pos.y >= kPlaneSide) return PacketDecodeError::BadPosition;
            r.time_ps = time_ps;
            return r;
        }
        case static_cast<uint8_t>(PacketType::EnergyRaw): {
            if ((b[4] & 0x08) != 0) return PacketDecodeError::ReservedBitsSet;
            EnergyRawRecord r;
            r.module_id = module_id;
            r.block_id = block_id;
            r.crystal.id = get_be16(&b[2]);
            if (r.crystal.id >= kCrystalCount) return PacketDecodeError::BadCrystalId;
            r.doi.value = b[4] >> 4;
            r.raw_energy = (uint32_t(b[4] & 0x7) << 16) | get_be16(&b[5]);
            r.time_ps = time_ps;
            return r;
        }
        default:
            return PacketDecodeError::BadType;
    }
}

std::vector<uint8_t> encode_hist_chunk(uint8_t block_id, uint16_t chunk_index,
                                       std::span<const uint16_t> bins) {
    std::vector<uint8_t> out;
    out.reserve(6 + bins.size() * 2);
    out.push_back(static_cast<uint8_t>(PacketType::HistChunk));
    out.push_back(block_id);
    put_le16(out, chunk_index);
    put_le16(out, static_cast<uint16_t>(bins.size()));
    for (uint16_t v : bins) put_le16(out, v);
    return out;
}

std::variant<PacketDecodeError, HistChunk> decode_hist_chunk(std::span<const uint8_t> b) {
    if (b.size() < 6 || b[0] != static_cast<uint8_t>(PacketType::HistChunk))
        return PacketDecodeError::BadType;
    HistChunk c;
    c.block_id = b[1];
    c.chunk_index = get_le16(&b[2]);
    const uint16_t count = get_le16(&b[4]);
    if (b.size() != 6 + size_t(count) * 2) return PacketDecodeError::BadLength;
    c.bins.resize(count);
    for (uint16_t i = 0; i < count; ++i) c.bins[i] = get_le16(&b[6 + 2 * i]);
    return c;
}

std::vector<uint8_t> encode_status(uint8_t module_id, uint8_t block_id, const BlockCounters& c) {
    std::vector<uint8_t> out;
    out.reserve(4 + 8 * 8);
    out.push_back(static_cast<uint8_t>(PacketType::Status));
    out.push_back(module_id);
    out.push_back(block_id);
    out.push_back(0);
    for (uint64_t v : {c.ingested, c.packaged, c.window_rejected, c.zero_sum, c.underflow,
                       c.dropped, c.histogrammed, c.hist_terminated})
        put_le64(out, v);
    return out;
}

std::variant<PacketDecodeError, StatusReport> decode_status(std::span<const uint8_t> b) {
    if (b.size() != 4 + 8 * 8) return PacketDecodeError::BadLength;
    if (b[0] != static_cast<uint8_t>(PacketType::Status)) return PacketDecodeError::BadType;
    if (b[3] != 0) return PacketDecodeError::ReservedBitsSet;
    StatusReport s;
    s.module_id = b[1];
    s.block_id = b[2];
    uint64_t* fields[8] = {&s.counters.ingested,   &s.counters.packaged,
                           &s.counters.window_rejected, &s.counters.zero_sum,
                           &s.counters.underflow,  &s.counters.dropped,
                           &s.counters.histogrammed, &s.counters.hist_terminated};
    for (int i = 0; i < 8; ++i) *fields[i] = get_le64(&b[4 + 8 * i]);
    return s;
}

}  // namespace petspu
