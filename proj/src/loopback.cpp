#include "petspu/loopback.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <stdexcept>

#include "petspu/daq_host.hpp"
#include "petspu/phantom.hpp"
#include "petspu/spu.hpp"
#include "petspu/udp.hpp"

namespace petspu {

namespace {

// Both transport directions behind one seam so the session logic is
// identical with and without sockets.
class Channel {
  public:
    Channel(bool use_udp, Spu& spu, DaqHost& host) : spu_(spu), host_(host) {
        if (use_udp) {
            host_sock_.emplace();
            host_sock_->bind_local(0);
            spu_sock_.emplace();
            spu_sock_->bind_local(0);
        }
    }

    void up(std::span<const uint8_t> datagram) {
        if (spu_sock_) {
            spu_sock_->send_to("127.0.0.1", host_sock_->local_port(), datagram);
            ++in_flight_;
            if (in_flight_ >= 64) drain_up(1);
        } else {
            host_.ingest_datagram(datagram);
        }
    }

    void down(std::span<const uint8_t> datagram) {
        if (host_sock_) {
            host_sock_->send_to("127.0.0.1", spu_sock_->local_port(), datagram);
            // one datagram in flight; commands apply between events
            auto d = spu_sock_->receive(2000);
            if (!d) throw std::runtime_error("downlink datagram lost on loopback");
            spu_.handle_downlink(*d);
        } else {
            spu_.handle_downlink(datagram);
        }
    }

    // Receive until the uplink goes quiet.
    void drain_up(int timeout_ms) {
        if (!host_sock_) return;
        while (auto d = host_sock_->receive(timeout_ms)) {
            host_.ingest_datagram(*d);
            if (in_flight_ > 0) --in_flight_;
        }
    }

  private:
    Spu& spu_;
    DaqHost& host_;
    std::optional<UdpSocket> host_sock_;
    std::optional<UdpSocket> spu_sock_;
    size_t in_flight_ = 0;
};

struct CounterSnapshot {
    uint64_t packaged = 0;

    static CounterSnapshot take(const Spu& spu) {
        CounterSnapshot s;
        for (int b = 0; b < kBlocksPerModule; ++b) s.packaged += spu.counters(b).packaged;
        return s;
    }
};

void pump_all(Spu& spu, Channel& ch) {
    std::vector<std::vector<uint8_t>> out;
    spu.pump_uplink(out);
    for (auto& d : out) ch.up(d);
}

void stream_events(Spu& spu, Channel& ch, const std::vector<RawEvent>& events) {
    size_t since_pump = 0;
    for (const RawEvent& ev : events) {
        spu.ingest(ev);
        if (++since_pump == 256) {
            pump_all(spu, ch);
            since_pump = 0;
        }
    }
    while (!spu.uplink_idle()) pump_all(spu, ch);
    ch.drain_up(20);
}

void send_commands(Channel& ch, const std::vector<Command>& cmds) {
    for (auto& dgram : pack_commands(cmds)) ch.down(dgram);
}

}  // namespace

LoopbackReport run_loopback(const LoopbackOptions& opt) {
    LoopbackReport rep;
    rep.events = opt.events;

    const PhantomSpec spec = PhantomSpec::standard(opt.seed, opt.events, opt.noise);
    const PhantomStream stream = generate_events(spec);
    const SpuConfig target = make_phantom_config(spec);

    // The SPU starts from the stock configuration; everything that
    // matters is then loaded over the downlink.
    Spu spu(make_default_config(spec.module_id));
    DaqHost host;
    Channel ch(opt.use_udp, spu, host);

    auto check = [&](bool cond, const char* what) {
        if (!cond && rep.failure.empty()) rep.failure = what;
        return cond;
    };

    // --- bring-up over the downlink -----------------------------------
    send_commands(ch, config_commands(target));

    // --- phase 1: regular package mode --------------------------------
    const auto before_regular = CounterSnapshot::take(spu);
    stream_events(spu, ch, stream.events);
    const uint64_t packaged_regular =
        CounterSnapshot::take(spu).packaged - before_regular.packaged;
    rep.packaged = packaged_regular;
    rep.decoded_regular = host.regular_records().size();

    for (const SinglesRecord& r : host.regular_records()) {
        if (r.time_ps < spec.t0_ps || (r.time_ps - spec.t0_ps) % spec.period_ps != 0) {
            ++rep.time_mismatches;
            continue;
        }
        const uint64_t index = (r.time_ps - spec.t0_ps) / spec.period_ps;
        if (index >= stream.truth_crystal.size() ||
            stream.truth_crystal[index] != r.crystal.id)
            ++rep.truth_mismatches;
    }

    // --- phase 2: online flood histogram -------------------------------
    std::vector<Command> hist_cmds;
    for (uint8_t b = 0; b < kBlocksPerModule; ++b)
        hist_cmds.push_back({spec.module_id, b, HistStartCmd{HistMode::Flood}});
    hist_cmds.push_back({spec.module_id, 0, SetModeCmd{Mode::FloodOnline}});
    send_commands(ch, hist_cmds);

    stream_events(spu, ch, stream.events);

    std::vector<Command> read_cmds;
    for (uint8_t b = 0; b < kBlocksPerModule; ++b)
        read_cmds.push_back({spec.module_id, b, HistReadCmd{}});
    send_commands(ch, read_cmds);
    while (!spu.uplink_idle()) pump_all(spu, ch);
    ch.drain_up(20);

    // --- phase 3: offline flood ----------------------------------------
    send_commands(ch, {{spec.module_id, 0, SetModeCmd{Mode::FloodOffline}}});
    stream_events(spu, ch, stream.events);

    for (int b = 0; b < kBlocksPerModule; ++b) {
        const ChunkAssembly& a = host.assembly(b);
        check(a.complete && a.gaps == 0, "flood readout incomplete");
        check(a.bins.size() == BlockHistogram::kFloodBins, "flood readout wrong length");
        const auto offline = host.build_offline_flood(b);
        for (size_t i = 0; i < offline.size() && i < a.bins.size(); ++i) {
            rep.online_flood_sum += a.bins[i];
            rep.offline_flood_sum += offline[i];
            if (a.bins[i] < BlockHistogram::kCounterMax && a.bins[i] != offline[i])
                ++rep.flood_mismatches;
        }
    }

    // --- phase 4: energy spectra, online then offline -------------------
    std::vector<Command> energy_cmds;
    for (uint8_t b = 0; b < kBlocksPerModule; ++b)
        energy_cmds.push_back({spec.module_id, b, HistResetCmd{}});
    for (uint8_t b = 0; b < kBlocksPerModule; ++b)
        energy_cmds.push_back({spec.module_id, b, HistStartCmd{HistMode::EnergySpectrum}});
    energy_cmds.push_back({spec.module_id, 0, SetModeCmd{Mode::EnergyOnline}});
    send_commands(ch, energy_cmds);

    stream_events(spu, ch, stream.events);

    // The chunk path is already covered by the flood readout; the online
    // spectra are compared straight from the block RAM.
    send_commands(ch, {{spec.module_id, 0, SetModeCmd{Mode::EnergyOffline}}});
    stream_events(spu, ch, stream.events);

    for (int b = 0; b < kBlocksPerModule; ++b) {
        const auto online = spu.histogram(b).read();
        check(spu.histogram(b).mode() == HistMode::EnergySpectrum, "hist mode not energy");
        const auto offline = host.build_offline_spectra(b, target.energy_shift);
        check(online.size() == offline.size(), "spectra length mismatch");
        for (size_t i = 0; i < online.size(); ++i)
            if (online[i] < BlockHistogram::kCounterMax && online[i] != offline[i])
                ++rep.spectra_mismatches;
    }

    // --- status + verdict ----------------------------------------------
    send_commands(ch, {{spec.module_id, 0, StatusCmd{}}});
    while (!spu.uplink_idle()) pump_all(spu, ch);
    ch.drain_up(20);

    rep.naks = spu.nak_count();
    rep.decode_errors = host.stats().decode_errors + host.stats().length_errors;
    uint64_t status_ingested = 0;
    for (int b = 0; b < kBlocksPerModule; ++b) {
        check(host.status(b).has_value(), "missing status report");
        if (host.status(b)) status_ingested += host.status(b)->counters.ingested;
    }
    // five passes over the phantom stream: regular, flood online/offline,
    // energy online/offline
    check(status_ingested == uint64_t(opt.events) * 5, "status ingested count wrong");

    check(rep.decoded_regular == rep.packaged, "decoded != packaged");
    check(rep.decode_errors == 0, "decode errors");
    check(rep.truth_mismatches == 0, "crystal truth mismatches");
    check(rep.time_mismatches == 0, "time correction mismatches");
    check(rep.flood_mismatches == 0, "online/offline flood disagreement");
    check(rep.spectra_mismatches == 0, "online/offline spectra disagreement");
    check(rep.online_flood_sum > 0, "empty flood");
    check(rep.naks == 0, "command naks");

    if (!opt.out_dir.empty()) {
        std::filesystem::create_directories(opt.out_dir);
        const ChunkAssembly& a = host.assembly(0);
        if (a.bins.size() == BlockHistogram::kFloodBins)
            write_flood_pgm(opt.out_dir + "/flood_block0.pgm", std::span<const uint16_t>(a.bins));
        write_spectra_csv(opt.out_dir + "/spectra_block0.csv",
                          std::span<const uint64_t>(host.build_offline_spectra(0, target.energy_shift)));
        write_stats_json(opt.out_dir + "/session_stats.json", host.stats());
    }

    rep.ok = rep.failure.empty();
    return rep;
}

std::string LoopbackReport::summary() const {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "events/pass:       %" PRIu64 "\n"
                  "packaged:          %" PRIu64 "\n"
                  "decoded regular:   %" PRIu64 "\n"
                  "decode errors:     %" PRIu64 "\n"
                  "truth mismatches:  %" PRIu64 "\n"
                  "time mismatches:   %" PRIu64 "\n"
                  "flood mismatches:  %" PRIu64 " (online sum %" PRIu64 ", offline sum %" PRIu64 ")\n"
                  "spectra mismatch:  %" PRIu64 "\n"
                  "naks:              %" PRIu64 "\n"
                  "result:            %s%s%s\n",
                  events, packaged, decoded_regular, decode_errors, truth_mismatches,
                  time_mismatches, flood_mismatches, online_flood_sum, offline_flood_sum,
                  spectra_mismatches, naks, ok ? "OK" : "FAILED",
                  ok ? "" : " - ", ok ? "" : failure.c_str());
    return buf;
}

}  // namespace petspu
