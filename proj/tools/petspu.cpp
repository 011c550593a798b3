// petspu: singles-processing toolchain for the dual-ended 23x23 LYSO
// block detector. Subcommands cover synthetic data generation, the SPU
// pipeline itself, the receiving DAQ host, CLT tooling, the link budget
// calculator, a full loopback session and the throughput benchmark.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>

#include "petspu/bench.hpp"
#include "petspu/crystal_lut.hpp"
#include "petspu/daq_host.hpp"
#include "petspu/loopback.hpp"
#include "petspu/netframe.hpp"
#include "petspu/phantom.hpp"
#include "petspu/rate_model.hpp"
#include "petspu/spu.hpp"
#include "petspu/udp.hpp"

using namespace petspu;

namespace {

Mode parse_mode(const std::string& name) {
    if (name == "regular") return Mode::RegularPackage;
    if (name == "flood-online") return Mode::FloodOnline;
    if (name == "flood-offline") return Mode::FloodOffline;
    if (name == "energy-online") return Mode::EnergyOnline;
    if (name == "energy-offline") return Mode::EnergyOffline;
    throw CLI::ValidationError("--mode", "unknown mode '" + name + "'");
}

struct PeerAddress {
    std::string host = "127.0.0.1";
    uint16_t port = 5000;
};

PeerAddress parse_peer(const std::string& s) {
    const auto colon = s.rfind(':');
    if (colon == std::string::npos) throw CLI::ValidationError("--peer", "expected host:port");
    PeerAddress p;
    p.host = s.substr(0, colon);
    p.port = uint16_t(std::stoul(s.substr(colon + 1)));
    return p;
}

// ---------------------------------------------------------------- simulate
int cmd_simulate(uint32_t events, uint64_t seed, uint16_t noise, const std::string& out,
                 const std::string& truth_csv, const std::string& tables_dir) {
    const PhantomSpec spec = PhantomSpec::standard(seed, events, noise);
    const PhantomStream stream = generate_events(spec);
    write_events(out, stream.events);
    std::printf("wrote %u events to %s\n", events, out.c_str());

    if (!truth_csv.empty()) {
        std::string text = "event,block,crystal,nominal_time_ps\n";
        char line[96];
        for (size_t i = 0; i < stream.events.size(); ++i) {
            std::snprintf(line, sizeof line, "%zu,%u,%u,%llu\n", i, stream.events[i].block_id,
                          stream.truth_crystal[i],
                          (unsigned long long)stream.nominal_time(spec, i));
            text += line;
        }
        write_file(truth_csv, {reinterpret_cast<const uint8_t*>(text.data()), text.size()});
        std::printf("wrote ground truth to %s\n", truth_csv.c_str());
    }

    if (!tables_dir.empty()) {
        std::filesystem::create_directories(tables_dir);
        const SpuConfig cfg = make_phantom_config(spec);
        const FullClt full = make_uniform_grid_clt();
        full.save(tables_dir + "/clt_full.bin");
        cfg.blocks[0].clt.save(tables_dir + "/clt_boundary.bin");
        cfg.blocks[0].peaks.save(tables_dir + "/peaks.bin");
        cfg.blocks[0].times.save(tables_dir + "/times.bin");
        std::printf("wrote matching tables to %s\n", tables_dir.c_str());
    }
    return 0;
}

// --------------------------------------------------------------------- spu
struct SpuArgs {
    std::string events_file;
    std::string mode = "regular";
    std::string boundary_clt, full_clt, peaks, times;
    uint16_t window_low = 350, window_high = 650;
    unsigned shift = 4;
    std::string y_pair = "cd";
    uint8_t module_id = 0;
    std::string peer;
    std::string out_frames;
    uint16_t downlink_port = 5001;
    bool downlink_requested = false;
    int listen_seconds = 0;
    std::string hist_pgm, hist_csv;
    bool read_hist = false;
    bool print_status = false;
};

SpuConfig build_spu_config(const SpuArgs& a) {
    SpuConfig cfg = make_default_config(a.module_id);
    cfg.mode = parse_mode(a.mode);
    cfg.window = {a.window_low, a.window_high};
    cfg.energy_shift = uint8_t(a.shift);
    if (a.y_pair == "ab")
        cfg.y_pair = End2YPair::MatchedAb;
    else if (a.y_pair != "cd")
        throw CLI::ValidationError("--y-pair", "expected cd or ab");

    if (!a.boundary_clt.empty() && !a.full_clt.empty())
        throw CLI::ValidationError("--clt", "give either --clt or --full-clt, not both");
    if (!a.boundary_clt.empty()) {
        const BoundaryClt b = BoundaryClt::load(a.boundary_clt);
        for (auto& blk : cfg.blocks) blk.clt = b;
    } else if (!a.full_clt.empty()) {
        const BoundaryClt b = decompose(FullClt::load(a.full_clt));
        for (auto& blk : cfg.blocks) blk.clt = b;
    }
    if (!a.peaks.empty()) {
        const PeakLut p = PeakLut::load(a.peaks);
        for (auto& blk : cfg.blocks) blk.peaks = p;
    }
    if (!a.times.empty()) {
        const TimeOffsetLut t = TimeOffsetLut::load(a.times);
        for (auto& blk : cfg.blocks) blk.times = t;
    }
    return cfg;
}

int cmd_spu(const SpuArgs& a) {
    const SpuConfig cfg = build_spu_config(a);
    Spu spu(cfg);

    // online histogram sessions are armed for the whole run
    if (cfg.mode == Mode::FloodOnline || cfg.mode == Mode::EnergyOnline) {
        const HistMode hm =
            cfg.mode == Mode::FloodOnline ? HistMode::Flood : HistMode::EnergySpectrum;
        for (int b = 0; b < kBlocksPerModule; ++b) (void)spu.histogram(b).start(hm);
    }

    std::unique_ptr<UdpSocket> uplink;
    PeerAddress peer;
    if (!a.peer.empty()) {
        peer = parse_peer(a.peer);
        uplink = std::make_unique<UdpSocket>();
    }
    std::unique_ptr<UdpSocket> downlink;
    if (a.downlink_requested || a.listen_seconds > 0) {
        downlink = std::make_unique<UdpSocket>();
        downlink->bind_local(a.downlink_port);
        std::printf("downlink listening on 127.0.0.1:%u\n", downlink->local_port());
    }
    std::unique_ptr<FrameFileWriter> frames;
    if (!a.out_frames.empty()) frames = std::make_unique<FrameFileWriter>(a.out_frames, FrameAddress{});

    uint64_t datagrams = 0, bytes = 0;
    auto sink = [&](std::vector<std::vector<uint8_t>>& out) {
        for (auto& d : out) {
            ++datagrams;
            bytes += d.size();
            if (uplink) uplink->send_to(peer.host, peer.port, d);
            if (frames) frames->write_payload(d);
        }
        out.clear();
    };
    auto poll_downlink = [&]() {
        if (!downlink) return;
        while (auto d = downlink->receive(0)) spu.handle_downlink(*d);
    };

    std::vector<std::vector<uint8_t>> out;
    if (!a.events_file.empty()) {
        const auto events = read_events(a.events_file);
        size_t n = 0;
        for (const RawEvent& ev : events) {
            spu.ingest(ev);
            if (++n % 256 == 0) {
                poll_downlink();
                spu.pump_uplink(out);
                sink(out);
            }
        }
        while (!spu.uplink_idle()) {
            spu.pump_uplink(out);
            sink(out);
        }
        std::printf("processed %zu events\n", events.size());
    }

    if (a.read_hist) {
        std::vector<uint8_t> readout;
        for (uint8_t b = 0; b < kBlocksPerModule; ++b)
            encode_command(readout, {a.module_id, b, HistReadCmd{}});
        spu.handle_downlink(readout);
        while (!spu.uplink_idle()) {
            spu.pump_uplink(out);
            sink(out);
        }
    }
    std::printf("sent %llu datagrams (%llu bytes)\n", (unsigned long long)datagrams,
                (unsigned long long)bytes);

    if (a.listen_seconds > 0) {
        const auto deadline =
            std::chrono::steady_clock::now() + std::chrono::seconds(a.listen_seconds);
        while (std::chrono::steady_clock::now() < deadline) {
            if (auto d = downlink->receive(200)) {
                spu.handle_downlink(*d);
                while (auto more = downlink->receive(0)) spu.handle_downlink(*more);
                spu.pump_uplink(out);
                sink(out);
            }
        }
    }

    if (!a.hist_pgm.empty()) {
        const auto bins = spu.histogram(0).read();
        if (bins.size() != BlockHistogram::kFloodBins)
            throw std::runtime_error("--hist-pgm needs a flood-online run");
        write_flood_pgm(a.hist_pgm, bins);
        std::printf("wrote %s\n", a.hist_pgm.c_str());
    }
    if (!a.hist_csv.empty()) {
        const auto bins = spu.histogram(0).read();
        if (bins.size() != BlockHistogram::kEnergyBins)
            throw std::runtime_error("--hist-csv needs an energy-online run");
        write_spectra_csv(a.hist_csv, bins);
        std::printf("wrote %s\n", a.hist_csv.c_str());
    }
    if (frames) frames->close();

    if (a.print_status) {
        std::printf("%-8s %10s %10s %10s %8s %9s %8s %12s %10s\n", "block", "ingested", "packaged",
                    "window-", "zerosum", "underflow", "dropped", "histogrammed", "hist-term");
        for (int b = 0; b < kBlocksPerModule; ++b) {
            const BlockCounters& n = spu.counters(b);
            std::printf("%-8d %10llu %10llu %10llu %8llu %9llu %8llu %12llu %10llu\n", b,
                        (unsigned long long)n.ingested, (unsigned long long)n.packaged,
                        (unsigned long long)n.window_rejected, (unsigned long long)n.zero_sum,
                        (unsigned long long)n.underflow, (unsigned long long)n.dropped,
                        (unsigned long long)n.histogrammed, (unsigned long long)n.hist_terminated);
        }
        std::printf("naks: %llu\n", (unsigned long long)spu.nak_count());
    }
    return 0;
}

// ---------------------------------------------------------------- daq-host
int cmd_daq_host(uint16_t port, const std::string& out_dir, int idle_ms, uint64_t expect_datagrams,
                 unsigned shift, const std::string& frames_file) {
    std::filesystem::create_directories(out_dir);

    DaqHost host;
    if (!frames_file.empty()) {
        for (const auto& payload : read_frame_file(frames_file)) host.ingest_datagram(payload);
    } else {
        UdpSocket sock;
        sock.bind_local(port);
        std::printf("listening on 127.0.0.1:%u\n", sock.local_port());

        bool got_any = false;
        for (;;) {
            auto d = sock.receive(idle_ms);
            if (!d) {
                if (got_any) break;  // idle after traffic: session over
                continue;            // still waiting for the first datagram
            }
            got_any = true;
            host.ingest_datagram(*d);
            if (expect_datagrams && host.stats().datagrams >= expect_datagrams) break;
        }
    }

    const SessionStats& s = host.stats();
    std::printf("datagrams %llu, packets %llu, decode errors %llu\n",
                (unsigned long long)s.datagrams, (unsigned long long)s.packets,
                (unsigned long long)s.decode_errors);

    for (int b = 0; b < kBlocksPerModule; ++b) {
        const ChunkAssembly& a = host.assembly(b);
        if (a.complete && a.bins.size() == BlockHistogram::kFloodBins)
            write_flood_pgm(out_dir + "/flood_online_block" + std::to_string(b) + ".pgm",
                            std::span<const uint16_t>(a.bins));
        if (a.complete && a.bins.size() == BlockHistogram::kEnergyBins)
            write_spectra_csv(out_dir + "/spectra_online_block" + std::to_string(b) + ".csv",
                              std::span<const uint16_t>(a.bins));
    }
    if (!host.flood_records().empty())
        for (int b = 0; b < kBlocksPerModule; ++b)
            write_flood_pgm(out_dir + "/flood_offline_block" + std::to_string(b) + ".pgm",
                            std::span<const uint64_t>(host.build_offline_flood(b)));
    if (!host.energy_records().empty())
        for (int b = 0; b < kBlocksPerModule; ++b)
            write_spectra_csv(out_dir + "/spectra_offline_block" + std::to_string(b) + ".csv",
                              std::span<const uint64_t>(host.build_offline_spectra(b, shift)));
    write_stats_json(out_dir + "/stats.json", s);
    std::printf("artifacts written to %s\n", out_dir.c_str());
    return 0;
}

// --------------------------------------------------------------------- clt
int cmd_clt_convert(const std::string& full_path, const std::string& boundary_path) {
    const FullClt full = FullClt::load(full_path);
    const BoundaryClt boundary = decompose(full);
    boundary.save(boundary_path);
    std::printf("converted %s -> %s\n", full_path.c_str(), boundary_path.c_str());
    return 0;
}

int cmd_clt_check(const std::string& full_path, const std::string& boundary_path) {
    const FullClt full = FullClt::load(full_path);
    const BoundaryClt boundary = BoundaryClt::load(boundary_path);
    uint64_t mismatches = 0;
    for (int y = 0; y < kPlaneSide; ++y)
        for (int x = 0; x < kPlaneSide; ++x) {
            const RawPosition p{uint16_t(x), uint16_t(y)};
            mismatches += boundary.lookup(p).id != full.lookup(p).id;
        }
    std::printf("%llu mismatches over %d positions\n", (unsigned long long)mismatches,
                kPlaneCells);
    return mismatches == 0 ? 0 : 1;
}

int cmd_clt_footprint(unsigned n, unsigned k) {
    const auto f = footprint(n, k);
    std::printf("full CLT:     %10llu bits  (%.4f Mb)\n", (unsigned long long)f.full_bits,
                bits_to_mb(f.full_bits));
    std::printf("boundary CLT: %10llu bits  (%.4f Mb)\n", (unsigned long long)f.boundary_bits,
                bits_to_mb(f.boundary_bits));
    std::printf("ratio:        %.4f\n", f.ratio());
    return 0;
}

// ------------------------------------------------------------------- rates
int cmd_rates(const RateParams& p) {
    const double pct = hit_probability(p) * 100.0;
    const auto r = system_rates(p);
    std::printf("hit probability per block:   %.4f %%\n", pct);
    std::printf("source singles rate:         %.2f M/s\n", r.singles_hz / 1e6);
    std::printf("system event rate (cr1):     %.2f M/s\n", r.cr1_hz / 1e6);
    std::printf("per-spu event rate (cr2):    %.2f M/s\n", r.cr2_hz / 1e6);
    std::printf("average uplink:              %.2f Mbps (%.2f MB/s)\n", r.avg_mbps,
                r.cr2_hz * p.bytes_per_event / 1e6);
    std::printf("ceiling uplink (4 blocks):   %.2f Mbps (%.2f MB/s)\n", r.max_mbps,
                p.max_rate_per_block_hz * 4 * p.bytes_per_event / 1e6);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PET singles processing unit toolchain"};
    app.require_subcommand(1);
    app.set_config("--config");

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a synthetic event file");
    uint32_t sim_events = 100000;
    uint64_t sim_seed = 1;
    uint16_t sim_noise = 0;
    std::string sim_out = "events.bin", sim_truth, sim_tables;
    sim->add_option("--events", sim_events, "number of events");
    sim->add_option("--seed", sim_seed, "random seed");
    sim->add_option("--noise", sim_noise, "per-channel jitter amplitude, ADC counts");
    sim->add_option("--out", sim_out, "output event file");
    sim->add_option("--truth", sim_truth, "also write a ground-truth CSV");
    sim->add_option("--tables", sim_tables, "also write matching CLT/LUT files to this directory");

    // spu
    auto* spu_cmd = app.add_subcommand("spu", "run the singles processing pipeline");
    SpuArgs sa;
    spu_cmd->add_option("--events", sa.events_file, "input event file");
    spu_cmd->add_option("--mode", sa.mode,
                        "regular|flood-online|flood-offline|energy-online|energy-offline");
    spu_cmd->add_option("--clt", sa.boundary_clt, "boundary CLT file for all blocks");
    spu_cmd->add_option("--full-clt", sa.full_clt, "full CLT file, converted on load");
    spu_cmd->add_option("--peaks", sa.peaks, "photopeak LUT file");
    spu_cmd->add_option("--times", sa.times, "time offset LUT file");
    spu_cmd->add_option("--window-low", sa.window_low, "energy window low edge / keV");
    spu_cmd->add_option("--window-high", sa.window_high, "energy window high edge / keV");
    spu_cmd->add_option("--shift", sa.shift, "energy spectrum scale shift (0..11)");
    spu_cmd->add_option("--y-pair", sa.y_pair,
                        "end-2 channel pair feeding the y average: cd (production) or ab");
    spu_cmd->add_option("--module-id", sa.module_id, "module id 0..11");
    spu_cmd->add_option("--peer", sa.peer, "uplink host:port");
    spu_cmd->add_option("--out-frames", sa.out_frames, "write uplink as an Ethernet frame capture");
    auto* dl_opt =
        spu_cmd->add_option("--downlink-port", sa.downlink_port, "UDP port for commands");
    spu_cmd->add_option("--listen", sa.listen_seconds, "keep serving commands for N seconds");
    spu_cmd->add_option("--hist-pgm", sa.hist_pgm, "dump block 0 flood histogram as PGM");
    spu_cmd->add_option("--hist-csv", sa.hist_csv, "dump block 0 energy spectrum as CSV");
    spu_cmd->add_flag("--read-hist", sa.read_hist, "stream histogram readout chunks at exit");
    spu_cmd->add_flag("--status", sa.print_status, "print per-block counters at exit");

    // daq-host
    auto* daq = app.add_subcommand("daq-host", "receive the uplink and write artifacts");
    uint16_t daq_port = 5000;
    std::string daq_out = "daq_out";
    int daq_idle = 2000;
    uint64_t daq_expect = 0;
    unsigned daq_shift = 4;
    std::string daq_frames;
    daq->add_option("--listen", daq_port, "UDP port to bind");
    daq->add_option("--out-dir", daq_out, "artifact directory");
    daq->add_option("--idle-ms", daq_idle, "stop after this quiet period");
    daq->add_option("--expect-datagrams", daq_expect, "stop after this many datagrams");
    daq->add_option("--shift", daq_shift, "offline spectrum scale shift");
    daq->add_option("--frames", daq_frames, "read a frame-capture file instead of a socket");

    // clt
    auto* clt = app.add_subcommand("clt", "crystal look-up table tooling");
    clt->require_subcommand(1);
    auto* conv = clt->add_subcommand("convert", "full CLT file -> boundary CLT file");
    std::string clt_full, clt_boundary;
    conv->add_option("full", clt_full, "full CLT file")->required();
    conv->add_option("boundary", clt_boundary, "boundary CLT output")->required();
    auto* check = clt->add_subcommand("check", "exhaustive equivalence of full vs boundary");
    check->add_option("full", clt_full, "full CLT file")->required();
    check->add_option("boundary", clt_boundary, "boundary CLT file")->required();
    auto* foot = clt->add_subcommand("footprint", "memory cost of dense vs boundary storage");
    unsigned foot_n = 9, foot_k = 529;
    foot->add_option("--n", foot_n, "position bits per axis");
    foot->add_option("--k", foot_k, "crystal count (perfect square)");
    auto* uni = clt->add_subcommand("make-uniform", "write the uniform-grid full CLT");
    std::string uni_out;
    uni->add_option("out", uni_out, "output file")->required();

    // rates
    auto* rates = app.add_subcommand("rates", "event-rate and bandwidth budget");
    RateParams rp;
    double activity_uci = 200.0;
    rates->add_option("--activity-uci", activity_uci, "source activity in microcurie");
    rates->add_option("--side-mm", rp.detector_side_mm, "detector block side length");
    rates->add_option("--radius-mm", rp.ring_radius_mm, "detector ring radius");
    rates->add_option("--efficiency", rp.detection_efficiency, "crystal detection efficiency");

    // loopback
    auto* loop = app.add_subcommand("loopback", "full SPU + DAQ host session over localhost");
    LoopbackOptions lo;
    bool loop_pipe = false;
    loop->add_option("--events", lo.events, "events per pass");
    loop->add_option("--seed", lo.seed, "phantom seed");
    loop->add_option("--noise", lo.noise, "phantom noise amplitude");
    loop->add_option("--out-dir", lo.out_dir, "write flood/spectra/stats artifacts");
    loop->add_flag("--pipe", loop_pipe, "hand datagrams over in-process instead of UDP");

    // bench
    auto* bench = app.add_subcommand("bench", "regular-mode throughput benchmark");
    BenchOptions bo;
    bench->add_option("--seconds", bo.seconds_per_phase, "measurement window per phase");

    // lets --config (and other app-level flags) appear after the
    // subcommand name as well as before it
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(sim_events, sim_seed, sim_noise, sim_out, sim_truth, sim_tables);
        if (spu_cmd->parsed()) {
            sa.downlink_requested = dl_opt->count() > 0;
            return cmd_spu(sa);
        }
        if (daq->parsed())
            return cmd_daq_host(daq_port, daq_out, daq_idle, daq_expect, daq_shift, daq_frames);
        if (clt->parsed()) {
            if (conv->parsed()) return cmd_clt_convert(clt_full, clt_boundary);
            if (check->parsed()) return cmd_clt_check(clt_full, clt_boundary);
            if (foot->parsed()) return cmd_clt_footprint(foot_n, foot_k);
            if (uni->parsed()) {
                make_uniform_grid_clt().save(uni_out);
                std::printf("wrote %s\n", uni_out.c_str());
                return 0;
            }
        }
        if (rates->parsed()) {
            rp.activity_bq = activity_uci * 3.7e4;  // 1 uCi = 37 kBq
            return cmd_rates(rp);
        }
        if (loop->parsed()) {
            lo.use_udp = !loop_pipe;
            const LoopbackReport rep = run_loopback(lo);
            std::printf("%s", rep.summary().c_str());
            return rep.ok ? 0 : 1;
        }
        if (bench->parsed()) {
            const BenchResult r = run_bench(bo);
            std::printf("%s", r.summary().c_str());
            return (r.single_pass && r.aggregate_pass) ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
