#include "petspu/io_util.hpp"

#include <cerrno>
#include <cstdio>
#include <stdexcept>

namespace petspu {

std::array<uint8_t, TableFileHeader::kSize> TableFileHeader::to_bytes() const {
    std::array<uint8_t, kSize> out{};
    std::memcpy(out.data(), magic.data(), 4);
    out[4] = static_cast<uint8_t>(version & 0xff);
    out[5] = static_cast<uint8_t>(version >> 8);
    out[6] = static_cast<uint8_t>(n_bits & 0xff);
    out[7] = static_cast<uint8_t>(n_bits >> 8);
    out[8] = static_cast<uint8_t>(k & 0xff);
    out[9] = static_cast<uint8_t>((k >> 8) & 0xff);
    out[10] = static_cast<uint8_t>((k >> 16) & 0xff);
    out[11] = static_cast<uint8_t>((k >> 24) & 0xff);
    // bytes 12..15 reserved, zero
    return out;
}

TableFileHeader TableFileHeader::from_bytes(std::span<const uint8_t> bytes) {
    if (bytes.size() < kSize) throw std::runtime_error("table file header truncated");
    TableFileHeader h;
    std::memcpy(h.magic.data(), bytes.data(), 4);
    h.version = get_le16(bytes.data() + 4);
    h.n_bits = get_le16(bytes.data() + 6);
    h.k = get_le32(bytes.data() + 8);
    if (h.version != 1) throw std::runtime_error("unsupported table file version");
    return h;
}

void write_file(const std::string& path, std::span<const uint8_t> bytes) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error(path + ": " + std::strerror(errno));
    const size_t n = bytes.empty() ? 0 : std::fwrite(bytes.data(), 1, bytes.size(), f);
    const int rc = std::fclose(f);
    if (n != bytes.size() || rc != 0) throw std::runtime_error(path + ": short write");
}

std::vector<uint8_t> read_file(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error(path + ": " + std::strerror(errno));
    std::fseek(f, 0, SEEK_END);
    const long size = std::ftell(f);
    std::fseek(f, 0, SEEK_SET);
    std::vector<uint8_t> bytes(size > 0 ? size_t(size) : 0);
    const size_t n = bytes.empty() ? 0 : std::fread(bytes.data(), 1, bytes.size(), f);
    std::fclose(f);
    if (n != bytes.size()) throw std::runtime_error(path + ": short read");
    return bytes;
}

}  // namespace petspu
