#include "petspu/events.hpp"

#include "petspu/io_util.hpp"

namespace petspu {

void write_events(const std::string& path, const std::vector<RawEvent>& events) {
    std::vector<uint8_t> bytes;
    bytes.reserve(events.size() * kEventRecordSize);
    for (const RawEvent& ev : events) {
        bytes.push_back(ev.module_id);
        bytes.push_back(ev.block_id);
        const ChannelIntegrals& c = ev.integrals;
        for (uint16_t v : {c.a1, c.b1, c.c1, c.d1, c.a2, c.b2, c.c2, c.d2}) put_le16(bytes, v);
        put_le64(bytes, ev.tdc_time_ps);
    }
    write_file(path, bytes);
}

std::vector<RawEvent> read_events(const std::string& path) {
    const auto bytes = read_file(path);
    if (bytes.size() % kEventRecordSize != 0)
        throw std::runtime_error(path + ": size is not a multiple of the 26-byte event record");

    std::vector<RawEvent> events(bytes.size() / kEventRecordSize);
    const uint8_t* p = bytes.data();
    for (RawEvent& ev : events) {
        ev.module_id = p[0];
        ev.block_id = p[1];
        if (ev.module_id >= kModulesPerRing || ev.block_id >= kBlocksPerModule)
            throw std::runtime_error(path + ": event with out-of-range module or block id");
        uint16_t* fields[8] = {&ev.integrals.a1, &ev.integrals.b1, &ev.integrals.c1,
                               &ev.integrals.d1, &ev.integrals.a2, &ev.integrals.b2,
                               &ev.integrals.c2, &ev.integrals.d2};
        for (int i = 0; i < 8; ++i) *fields[i] = get_le16(p + 2 + 2 * i);
        ev.tdc_time_ps = get_le64(p + 18);
        p += kEventRecordSize;
    }
    return events;
}

}  // namespace petspu
