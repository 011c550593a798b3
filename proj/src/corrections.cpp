#include "petspu/corrections.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace petspu {

namespace {
constexpr char kPeakMagic[4] = {'L', 'U', 'T', 'P'};
constexpr char kTimeMagic[4] = {'L', 'U', 'T', 'T'};
}  // namespace

void PeakLut::validate() const {
    for (int i = 0; i < kCrystalCount; ++i)
        if (peaks[i] == 0)
            throw std::runtime_error("peak LUT entry " + std::to_string(i) + " is zero");
}

// Peak LUT file: 16-byte header (magic LUTP, k=529) + 529 u16 LE peaks.
void PeakLut::save(const std::string& path) const {
    validate();
    TableFileHeader hdr;
    std::copy(std::begin(kPeakMagic), std::end(kPeakMagic), hdr.magic.begin());
    hdr.k = kCrystalCount;

    std::vector<uint8_t> bytes;
    auto h = hdr.to_bytes();
    bytes.insert(bytes.end(), h.begin(), h.end());
    for (uint16_t v : peaks) put_le16(bytes, v);
    write_file(path, bytes);
}

PeakLut PeakLut::load(const std::string& path) {
    const auto bytes = read_file(path);
    if (bytes.size() != TableFileHeader::kSize + size_t(kCrystalCount) * 2)
        throw std::runtime_error(path + ": wrong size for a peak LUT file");
    const auto hdr = TableFileHeader::from_bytes(bytes);
    if (!std::equal(std::begin(kPeakMagic), std::end(kPeakMagic), hdr.magic.begin()))
        throw std::runtime_error(path + ": not a peak LUT file");

    PeakLut lut;
    const uint8_t* p = bytes.data() + TableFileHeader::kSize;
    for (int i = 0; i < kCrystalCount; ++i, p += 2) lut.peaks[i] = get_le16(p);
    lut.validate();
    return lut;
}

// Time LUT file: 16-byte header (magic LUTT, k=529) + 529 i32 LE offsets.
void TimeOffsetLut::save(const std::string& path) const {
    TableFileHeader hdr;
    std::copy(std::begin(kTimeMagic), std::end(kTimeMagic), hdr.magic.begin());
    hdr.k = kCrystalCount;

    std::vector<uint8_t> bytes;
    auto h = hdr.to_bytes();
    bytes.insert(bytes.end(), h.begin(), h.end());
    for (int32_t v : offsets) put_le32(bytes, static_cast<uint32_t>(v));
    write_file(path, bytes);
}

TimeOffsetLut TimeOffsetLut::load(const std::string& path) {
    const auto bytes = read_file(path);
    if (bytes.size() != TableFileHeader::kSize + size_t(kCrystalCount) * 4)
        throw std::runtime_error(path + ": wrong size for a time offset LUT file");
    const auto hdr = TableFileHeader::from_bytes(bytes);
    if (!std::equal(std::begin(kTimeMagic), std::end(kTimeMagic), hdr.magic.begin()))
        throw std::runtime_error(path + ": not a time offset LUT file");

    TimeOffsetLut lut;
    const uint8_t* p = bytes.data() + TableFileHeader::kSize;
    for (int i = 0; i < kCrystalCount; ++i, p += 4)
        lut.offsets[i] = static_cast<int32_t>(get_le32(p));
    return lut;
}

}  // namespace petspu
