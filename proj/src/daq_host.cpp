#include "petspu/daq_host.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "petspu/io_util.hpp"

namespace petspu {

void DaqHost::ingest_datagram(std::span<const uint8_t> payload) {
    ++stats_.datagrams;
    if (payload.empty()) return;

    switch (payload[0]) {
        case static_cast<uint8_t>(PacketType::HistChunk): {
            auto decoded = decode_hist_chunk(payload);
            if (std::holds_alternative<PacketDecodeError>(decoded)) {
                ++stats_.chunk_errors;
                return;
            }
            auto& chunk = std::get<HistChunk>(decoded);
            if (chunk.block_id >= kBlocksPerModule) {
                ++stats_.chunk_errors;
                return;
            }
            ChunkAssembly& a = assemblies_[chunk.block_id];
            if (chunk.chunk_index == 0 && (a.complete || a.next_index != 0))
                a = ChunkAssembly{};  // a new readout for this block begins
            if (chunk.chunk_index != a.next_index || a.complete) {
                ++a.gaps;
                ++stats_.chunk_errors;
                return;
            }
            if (chunk.end_of_readout()) {
                a.complete = true;
            } else {
                a.bins.insert(a.bins.end(), chunk.bins.begin(), chunk.bins.end());
                ++a.next_index;
            }
            return;
        }
        case static_cast<uint8_t>(PacketType::Status): {
            auto decoded = decode_status(payload);
            if (std::holds_alternative<PacketDecodeError>(decoded)) {
                ++stats_.decode_errors;
                return;
            }
            const auto& s = std::get<StatusReport>(decoded);
            if (s.module_id < kModulesPerRing && s.block_id < kBlocksPerModule)
                status_[s.block_id] = s;
            return;
        }
        default:
            break;  // a run of 16-byte event packets
    }

    size_t off = 0;
    for (; off + 16 <= payload.size(); off += 16) {
        ++stats_.packets;
        auto decoded = decode_packet(payload.subspan(off, 16));
        if (std::holds_alternative<PacketDecodeError>(decoded)) {
            ++stats_.decode_errors;
            continue;
        }
        if (const auto* r = std::get_if<SinglesRecord>(&decoded)) {
            ++stats_.per_block[r->module_id][r->block_id].regular;
            regular_.push_back(*r);
        } else if (const auto* f = std::get_if<FloodRawRecord>(&decoded)) {
            ++stats_.per_block[f->module_id][f->block_id].flood_raw;
            flood_.push_back(*f);
        } else if (const auto* e = std::get_if<EnergyRawRecord>(&decoded)) {
            ++stats_.per_block[e->module_id][e->block_id].energy_raw;
            energy_.push_back(*e);
        }
    }
    if (off != payload.size()) ++stats_.length_errors;  // ragged tail
}

std::vector<uint64_t> DaqHost::build_offline_flood(int block) const {
    std::vector<uint64_t> bins(BlockHistogram::kFloodBins, 0);
    for (const auto& r : flood_)
        if (r.block_id == block) ++bins[BlockHistogram::flood_addr(r.pos)];
    return bins;
}

std::vector<uint64_t> DaqHost::build_offline_spectra(int block, unsigned scale_shift) const {
    std::vector<uint64_t> bins(BlockHistogram::kEnergyBins, 0);
    for (const auto& r : energy_)
        if (r.block_id == block)
            ++bins[BlockHistogram::energy_addr(r.crystal, r.raw_energy, scale_shift)];
    return bins;
}

void DaqHost::clear_records() {
    regular_.clear();
    flood_.clear();
    energy_.clear();
}

namespace {

template <class T>
void write_pgm_impl(const std::string& path, std::span<const T> bins) {
    if (bins.size() != BlockHistogram::kFloodBins)
        throw std::invalid_argument("flood image must have 512x512 bins");

    uint64_t maxval = 1;
    for (T v : bins) maxval = std::max<uint64_t>(maxval, v);
    maxval = std::min<uint64_t>(maxval, 65535);

    std::vector<uint8_t> out;
    const std::string header =
        "P5\n512 512\n" + std::to_string(maxval) + "\n";
    out.insert(out.end(), header.begin(), header.end());
    const bool wide = maxval > 255;
    out.reserve(out.size() + bins.size() * (wide ? 2 : 1));
    for (T v : bins) {
        const uint64_t clamped = std::min<uint64_t>(v, maxval);
        if (wide) out.push_back(static_cast<uint8_t>(clamped >> 8));
        out.push_back(static_cast<uint8_t>(clamped & 0xff));
    }
    write_file(path, out);
}

template <class T>
void write_csv_impl(const std::string& path, std::span<const T> bins) {
    if (bins.size() != BlockHistogram::kEnergyBins)
        throw std::invalid_argument("spectra must have 529x256 bins");

    std::string out;
    out.reserve(bins.size() * 12);
    char line[48];
    for (size_t i = 0; i < bins.size(); ++i) {
        const unsigned id = unsigned(i / 256), bin = unsigned(i % 256);
        const int n = std::snprintf(line, sizeof line, "%u,%u,%llu\n", id, bin,
                                    static_cast<unsigned long long>(bins[i]));
        out.append(line, size_t(n));
    }
    write_file(path, {reinterpret_cast<const uint8_t*>(out.data()), out.size()});
}

}  // namespace

void write_flood_pgm(const std::string& path, std::span<const uint64_t> bins) {
    write_pgm_impl(path, bins);
}
void write_flood_pgm(const std::string& path, std::span<const uint16_t> bins) {
    write_pgm_impl(path, bins);
}
void write_spectra_csv(const std::string& path, std::span<const uint64_t> bins) {
    write_csv_impl(path, bins);
}
void write_spectra_csv(const std::string& path, std::span<const uint16_t> bins) {
    write_csv_impl(path, bins);
}

void write_stats_json(const std::string& path, const SessionStats& stats) {
    nlohmann::json j;
    j["datagrams"] = stats.datagrams;
    j["packets"] = stats.packets;
    j["decode_errors"] = stats.decode_errors;
    j["length_errors"] = stats.length_errors;
    j["chunk_errors"] = stats.chunk_errors;
    auto& blocks = j["blocks"] = nlohmann::json::array();
    for (int m = 0; m < kModulesPerRing; ++m) {
        for (int b = 0; b < kBlocksPerModule; ++b) {
            const auto& pb = stats.per_block[m][b];
            if (pb.regular == 0 && pb.flood_raw == 0 && pb.energy_raw == 0) continue;
            blocks.push_back({{"module", m},
                              {"block", b},
                              {"regular", pb.regular},
                              {"flood_raw", pb.flood_raw},
                              {"energy_raw", pb.energy_raw}});
        }
    }
    const std::string text = j.dump(2) + "\n";
    write_file(path, {reinterpret_cast<const uint8_t*>(text.data()), text.size()});
}

}  // namespace petspu
