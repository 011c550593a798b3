// Acceptance suite: one pass/fail line per release criterion, exit code
// equals the number of failures. Expected values come from the design
// budget and from the independent reference implementations in
// oracles.hpp; tolerances are pinned here, in code.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "petspu/bench.hpp"
#include "petspu/crystal_lut.hpp"
#include "petspu/daq_host.hpp"
#include "petspu/loopback.hpp"
#include "petspu/netframe.hpp"
#include "petspu/phantom.hpp"
#include "petspu/pipeline.hpp"
#include "petspu/rate_model.hpp"
#include "petspu/spu.hpp"
#include "testgen.hpp"

using namespace petspu;

namespace {

struct Check {
    std::string detail;
    bool ok = true;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

double round2(double v) { return std::round(v * 100.0) / 100.0; }

// 1. CLT size arithmetic
bool clt_footprint(Check& c) {
    const auto f = footprint(9, 529);
    c.expect(f.full_bits == 2'621'440, "full bits != 2,621,440");
    c.expect(f.boundary_bits == 202'752, "boundary bits != 202,752");
    c.expect(round2(bits_to_mb(f.full_bits)) == 2.50, "full != 2.5 Mb");

    const double per_block_mb = round2(bits_to_mb(f.boundary_bits));
    c.expect(per_block_mb == 0.19, "per-block boundary Mb != 0.19");
    c.expect(round2(4 * per_block_mb) == 0.76, "four-block boundary Mb != 0.76");

    c.expect(std::abs(f.ratio() - 12.93) <= 0.01, "exact ratio not 12.93 +/- 0.01");
    c.expect(round2(2.5 / 0.19) == 13.16, "rounded quotient not 13.16");

    char buf[160];
    std::snprintf(buf, sizeof buf, "full %llu bits (2.5 Mb), boundary %llu bits (%.4f Mb), ratio %.4f",
                  (unsigned long long)f.full_bits, (unsigned long long)f.boundary_bits,
                  bits_to_mb(f.boundary_bits), f.ratio());
    if (c.ok) c.detail = buf;
    return c.ok;
}

// 2. memory table reproduction
bool memory_table(Check& c) {
    const uint64_t flood_bits = 4 * BlockHistogram::flood_bits_per_block();
    const uint64_t energy_bits = 4 * BlockHistogram::energy_bits_per_block();

    c.expect(flood_bits == 4ull * 512 * 512 * 10, "flood bit count mismatch");
    c.expect(bits_to_mb(flood_bits) == 10.0, "flood != 10 Mb exactly");
    c.expect(energy_bits == 4ull * 135'424 * 10, "energy bit count mismatch");
    c.expect(std::abs(bits_to_mb(energy_bits) - 5.166) <= 0.001, "energy != 5.166 Mb");
    c.expect(std::abs(bits_to_mb(energy_bits) - 5.16) <= 0.01, "energy not 5.16 within rounding");

    char buf[120];
    std::snprintf(buf, sizeof buf, "flood %.3f Mb, energy spectrum %.3f Mb (4 blocks)",
                  bits_to_mb(flood_bits), bits_to_mb(energy_bits));
    if (c.ok) c.detail = buf;
    return c.ok;
}

// 3. rate budget
bool rate_budget(Check& c) {
    const RateParams p;
    const double pct = hit_probability(p) * 100.0;
    const auto r = system_rates(p);

    c.expect(std::abs(pct - 1.72) <= 0.005, "hit probability not 1.72%");
    c.expect(std::abs(r.cr1_hz - 9.78e6) <= 0.05e6, "cr1 not 9.78M");
    c.expect(std::abs(r.cr2_hz - 0.82e6) <= 0.005e6, "cr2 not 0.82M");
    c.expect(std::abs(r.avg_mbps - 105.0) <= 1.0, "avg bandwidth not 105 Mbps");
    c.expect(std::abs(r.max_mbps - 512.0) <= 1.0, "max bandwidth not 512 Mbps");

    char buf[160];
    std::snprintf(buf, sizeof buf, "%.4f%%, cr1 %.4g, cr2 %.4g, %.2f / %.0f Mbps", pct, r.cr1_hz,
                  r.cr2_hz, r.avg_mbps, r.max_mbps);
    if (c.ok) c.detail = buf;
    return c.ok;
}

// 4. boundary CLT equivalence on 20 random separable tables
bool clt_equivalence(Check& c) {
    std::mt19937_64 rng(20250808);
    uint64_t mismatches = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const FullClt clt = testgen::make_random_separable_clt(rng);
        const BoundaryClt b = decompose(clt);
        for (int y = 0; y < kPlaneSide; ++y)
            for (int x = 0; x < kPlaneSide; ++x) {
                const RawPosition pos{uint16_t(x), uint16_t(y)};
                mismatches += b.lookup(pos).id != clt.lookup(pos).id;
            }
    }
    c.expect(mismatches == 0, "lookup mismatches: " + std::to_string(mismatches));
    if (c.ok) c.detail = "20 tables x 262,144 positions, 0 mismatches";
    return c.ok;
}

// 5. positioning against the exact rational oracle
bool positioning_exact(Check& c) {
    {
        const ChannelIntegrals eq{40, 40, 40, 40, 40, 40, 40, 40};
        const auto r = compute_position(eq);
        c.expect(r && r->pos.x == 256 && r->pos.y == 256 && r->doi.value == 8,
                 "all-equal example wrong");
        const ChannelIntegrals corner{100, 0, 0, 100, 100, 0, 0, 100};
        const auto rc = compute_position(corner);
        c.expect(rc && rc->pos.x == 511, "corner example wrong");
        const ChannelIntegrals asym{100, 50, 25, 25, 80, 40, 40, 40};
        const auto ra = compute_position(asym);
        c.expect(ra && ra->pos.x == 313 && ra->pos.y == 294 && ra->doi.value == 8,
                 "worked example wrong");
    }

    std::mt19937_64 rng(424242);
    uint64_t mismatches = 0;
    for (int i = 0; i < 10000; ++i) {
        const ChannelIntegrals in = oracles::random_valid_integrals(rng);
        const auto got = compute_position(in);
        const auto want = oracles::position(in);
        if (!got || got->pos.x != want.x || got->pos.y != want.y || got->doi.value != want.doi)
            ++mismatches;
    }
    c.expect(mismatches == 0, "oracle mismatches: " + std::to_string(mismatches));

    uint64_t scale_breaks = 0;
    for (int i = 0; i < 1000; ++i) {
        const ChannelIntegrals base = oracles::random_valid_integrals(rng, 8191);
        const uint16_t k = uint16_t(1 + testgen::bounded(rng, 8));
        ChannelIntegrals scaled = base;
        for (uint16_t* f : {&scaled.a1, &scaled.b1, &scaled.c1, &scaled.d1, &scaled.a2, &scaled.b2,
                            &scaled.c2, &scaled.d2})
            *f = uint16_t(*f * k);
        scale_breaks += !(compute_position(base) == compute_position(scaled));
    }
    c.expect(scale_breaks == 0, "scale invariance broken");
    if (c.ok) c.detail = "10,000 oracle samples + 1,000 scale pairs, exact";
    return c.ok;
}

// 6. histogram state machine
bool histogram_machine(Check& c) {
    std::mt19937_64 rng(606060);
    {
        BlockHistogram h;
        if (!h.start(HistMode::Flood)) c.expect(false, "start failed");
        uint64_t accepted = 0;
        for (int i = 0; i < 1'000'000; ++i) {
            const uint32_t addr = uint32_t(testgen::bounded(rng, 8192));
            if (h.accumulate(addr) == AccumResult::Accepted) ++accepted;
        }
        uint64_t sum = 0;
        for (uint16_t v : h.read()) sum += v;
        c.expect(sum == accepted, "conservation broken");
    }
    {
        BlockHistogram h;
        (void)h.start(HistMode::Flood);
        for (int i = 0; i < 1023; ++i)
            if (h.accumulate(99) != AccumResult::Accepted) c.expect(false, "early terminate");
        c.expect(h.accumulate(99) == AccumResult::Terminated, "1024th not Terminated");
        c.expect(h.full(), "full flag not set");
        c.expect(h.read()[99] == 1023, "counter wrapped");
    }
    {
        const int before = BlockHistogram::live_buffer_count();
        Spu spu(make_default_config());
        c.expect(BlockHistogram::live_buffer_count() - before == 4,
                 "not exactly one buffer per block");
        for (int b = 0; b < 4; ++b) {
            (void)spu.histogram(b).start(HistMode::EnergySpectrum);
            spu.histogram(b).reset();
            (void)spu.histogram(b).start(HistMode::Flood);
        }
        c.expect(BlockHistogram::live_buffer_count() - before == 4,
                 "mode switch allocated a second buffer");
    }
    if (c.ok) c.detail = "conservation over 1e6, ceiling at 1023, 4 buffers for 4 blocks";
    return c.ok;
}

// 7. photopeak alignment across crystals 76 and 79
bool photopeak_alignment(Check& c) {
    PhantomSpec spec = PhantomSpec::standard(777, 20000);
    spec.gain[76] = 900;
    spec.gain[79] = 1100;
    const PhantomStream stream = generate_events(spec);
    SpuConfig cfg = make_phantom_config(spec);

    // uncorrected spectra on the host side
    DaqHost host;
    {
        cfg.mode = Mode::EnergyOffline;
        BlockFifo fifo;
        BlockHistogram hist;
        BlockCounters n;
        PacketBytes p;
        for (RawEvent ev : stream.events) {
            ev.block_id = 0;
            process_event(ev, cfg, fifo, hist, n);
            while (fifo.pop(p)) host.ingest_datagram(std::vector<uint8_t>(p.begin(), p.end()));
        }
    }
    const auto spectra = host.build_offline_spectra(0, cfg.energy_shift);
    auto peak_bin = [&](int id) {
        int best = 0;
        uint64_t best_count = 0;
        for (int bin = 0; bin < 256; ++bin) {
            const uint64_t v = spectra[size_t(id) * 256 + bin];
            if (v > best_count) {
                best_count = v;
                best = bin;
            }
        }
        return best;
    };
    const int bin76 = peak_bin(76), bin79 = peak_bin(79);
    c.expect(bin76 != bin79, "uncorrected photopeaks fall in the same bin");
    c.expect(bin76 == 900 >> 4 && bin79 == 1100 >> 4, "peak bins not at the configured gains");

    // corrected energies through the regular pipeline
    {
        cfg.mode = Mode::RegularPackage;
        BlockFifo fifo;
        BlockHistogram hist;
        BlockCounters n;
        DaqHost reg_host;
        PacketBytes p;
        uint64_t checked = 0;
        for (size_t i = 0; i < stream.events.size(); ++i) {
            const uint16_t truth = stream.truth_crystal[i];
            if (truth != 76 && truth != 79) continue;
            RawEvent ev = stream.events[i];
            ev.block_id = 0;
            process_event(ev, cfg, fifo, hist, n);
            while (fifo.pop(p)) reg_host.ingest_datagram(std::vector<uint8_t>(p.begin(), p.end()));
            ++checked;
        }
        c.expect(checked > 0, "no photopeak events for the two crystals");
        c.expect(reg_host.regular_records().size() == checked, "records lost");
        for (const auto& r : reg_host.regular_records())
            if (r.energy_kev != 511) {
                c.expect(false, "corrected energy != 511 keV");
                break;
            }
    }
    if (c.ok)
        c.detail = "uncorrected bins " + std::to_string(bin76) + " vs " + std::to_string(bin79) +
                   ", corrected both exactly 511 keV";
    return c.ok;
}

// 8. protocol round trips and checksum oracles
bool protocol_round_trip(Check& c) {
    // exhaustive module x block x doi sweep
    {
        SinglesRecord r;
        r.crystal.id = 345;
        r.energy_kev = 511;
        r.time_ps = 0xA1B2C3D4E5F60718ull;
        for (uint8_t m = 0; m < kModulesPerRing && c.ok; ++m)
            for (uint8_t b = 0; b < kBlocksPerModule; ++b)
                for (uint8_t doi = 0; doi < 16; ++doi) {
                    r.module_id = m;
                    r.block_id = b;
                    r.doi.value = doi;
                    const PacketBytes p = encode_packet(r);
                    if (p != PacketBytes(oracles::regular_packet(r)) ||
                        !(std::get<SinglesRecord>(decode_packet(p)) == r)) {
                        c.expect(false, "sweep mismatch");
                        break;
                    }
                }
    }

    std::mt19937_64 rng(808080);
    uint64_t bad = 0;
    for (int i = 0; i < 100000; ++i) {
        SinglesRecord r;
        r.module_id = uint8_t(testgen::bounded(rng, kModulesPerRing));
        r.block_id = uint8_t(testgen::bounded(rng, kBlocksPerModule));
        r.crystal.id = uint16_t(testgen::bounded(rng, kCrystalCount));
        r.doi.value = uint8_t(testgen::bounded(rng, 16));
        r.energy_kev = uint16_t(rng());
        r.time_ps = rng();
        const auto decoded = decode_packet(encode_packet(r));
        bad += !(std::holds_alternative<SinglesRecord>(decoded) &&
                 std::get<SinglesRecord>(decoded) == r);
    }
    c.expect(bad == 0, "random record round trips failed");

    // frames and checksums
    FrameAddress addr;
    uint64_t frame_bad = 0, ck_bad = 0, crc_bad = 0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<uint8_t> payload(1 + testgen::bounded(rng, kMaxUdpPayload));
        for (auto& byte : payload) byte = uint8_t(rng());
        const auto frame = build_frame(payload, addr, uint16_t(i));
        const auto parsed = parse_frame(frame);
        frame_bad += !(std::holds_alternative<ParsedFrame>(parsed) &&
                       std::get<ParsedFrame>(parsed).payload == payload);

        std::vector<uint8_t> hdr(frame.begin() + kEthHeaderSize,
                                 frame.begin() + kEthHeaderSize + kIpHeaderSize);
        hdr[10] = hdr[11] = 0;
        const uint16_t got = ip_checksum(hdr);
        ck_bad += got != oracles::internet_checksum(hdr);

        crc_bad += crc32(payload) != oracles::crc32(payload);

        const size_t udp_len = kUdpHeaderSize + payload.size();
        std::vector<uint8_t> seg(frame.begin() + kEthHeaderSize + kIpHeaderSize,
                                 frame.begin() + kEthHeaderSize + kIpHeaderSize + udp_len);
        seg[6] = seg[7] = 0;
        ck_bad += udp_checksum(addr.src_ip, addr.dst_ip, seg) !=
                  oracles::udp_checksum(addr.src_ip, addr.dst_ip, seg);
    }
    c.expect(frame_bad == 0, "frame round trips failed");
    c.expect(ck_bad == 0, "checksum oracle mismatches");
    c.expect(crc_bad == 0, "crc oracle mismatches");

    // single-byte header corruption sweep
    {
        std::vector<uint8_t> payload(128);
        for (auto& byte : payload) byte = uint8_t(rng());
        const auto frame = build_frame(payload, addr, 99);
        uint64_t undetected = 0;
        for (size_t pos = kEthHeaderSize; pos < kEthHeaderSize + kIpHeaderSize; ++pos)
            for (int delta = 1; delta < 256; delta += 37) {
                auto corrupted = frame;
                corrupted[pos] ^= uint8_t(delta);
                undetected += !std::holds_alternative<FrameError>(parse_frame(corrupted));
            }
        c.expect(undetected == 0, "undetected IP header corruption");

        // with the FCS, corruption anywhere in the frame is caught
        auto fcs_frame = frame;
        const uint32_t fcs = crc32(fcs_frame);
        for (int j = 0; j < 4; ++j) fcs_frame.push_back(uint8_t(fcs >> (8 * j)));
        uint64_t fcs_undetected = 0;
        for (size_t pos = 0; pos < fcs_frame.size() - 4; pos += 3) {
            auto corrupted = fcs_frame;
            corrupted[pos] ^= 0x10;
            fcs_undetected += !std::holds_alternative<FrameError>(parse_frame(corrupted, true));
        }
        c.expect(fcs_undetected == 0, "undetected corruption under the fcs");
    }

    if (c.ok) c.detail = "768-combination sweep, 1e5 records, 1,000 frames, corruption sweeps";
    return c.ok;
}

// 9. throughput floors
bool throughput(Check& c) {
    BenchOptions opt;
    opt.seconds_per_phase = 10.0;
    opt.verbose = false;
    const BenchResult r = run_bench(opt);
    c.expect(r.single_pass, "single-block rate below 1e6 events/s");
    c.expect(r.aggregate_pass, "aggregate rate below 4e6 events/s");

    char buf[120];
    std::snprintf(buf, sizeof buf, "single %.3g events/s, aggregate %.3g events/s",
                  r.single_eps, r.aggregate_eps);
    if (c.ok) c.detail = buf;
    return c.ok;
}

// 10. end-to-end loopback over localhost
bool loopback(Check& c) {
    LoopbackOptions opt;
    opt.events = 100000;
    opt.seed = 1;
    opt.use_udp = true;
    const LoopbackReport rep = run_loopback(opt);
    c.expect(rep.ok, rep.failure);
    c.expect(rep.decoded_regular == rep.packaged, "decoded != packaged");
    c.expect(rep.decode_errors == 0, "decode errors");
    c.expect(rep.truth_mismatches == 0, "crystal truth mismatches");
    c.expect(rep.flood_mismatches == 0, "flood online/offline disagreement");

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%llu packaged = %llu decoded, 0 errors, floods agree (sum %llu)",
                  (unsigned long long)rep.packaged, (unsigned long long)rep.decoded_regular,
                  (unsigned long long)rep.online_flood_sum);
    if (c.ok) c.detail = buf;
    return c.ok;
}

}  // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;

    struct Criterion {
        const char* name;
        std::function<bool(Check&)> fn;
    };
    const std::vector<Criterion> criteria = {
        {"clt-size-arithmetic", clt_footprint},
        {"memory-table", memory_table},
        {"rate-budget", rate_budget},
        {"boundary-clt-equivalence", clt_equivalence},
        {"positioning-exactness", positioning_exact},
        {"histogram-state-machine", histogram_machine},
        {"photopeak-alignment", photopeak_alignment},
        {"protocol-round-trip", protocol_round_trip},
        {"throughput", throughput},
        {"end-to-end-loopback", loopback},
    };

    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        if (quick && criteria[i].name == std::string("throughput")) {
            std::printf("[SKIP] %02zu %-26s (quick mode)\n", i + 1, criteria[i].name);
            continue;
        }
        Check c;
        bool ok = false;
        try {
            ok = criteria[i].fn(c);
        } catch (const std::exception& e) {
            c.detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] %02zu %-26s %s\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].name,
                    c.detail.c_str());
        std::fflush(stdout);
        failures += !ok;
    }

    if (failures == 0)
        std::printf("all %zu criteria passed\n", criteria.size());
    else
        std::printf("%d criteria FAILED\n", failures);
    return failures;
}
