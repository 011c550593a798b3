#include "petspu/bench.hpp"

#include <chrono>
#include <cstdio>
#include <memory>
#include <thread>
#include <vector>

#include "petspu/phantom.hpp"
#include "petspu/pipeline.hpp"
#include "petspu/spu.hpp"

namespace petspu {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// One block context: own FIFO, histogram and counters, as in the four-way
// parallel deployment.
struct BlockContext {
    BlockFifo fifo;
    BlockHistogram hist;
    BlockCounters counters;
};

// Process events and drain the FIFO in 92-packet batches on the same
// thread. The datagram buffer is reused; its bytes are what the uplink
// would ship.
uint64_t run_block(const SpuConfig& cfg, const std::vector<RawEvent>& events, double seconds,
                   BlockContext& ctx) {
    std::vector<uint8_t> dgram;
    dgram.reserve(kPacketsPerDatagram * 16);

    uint64_t done = 0;
    const auto t0 = Clock::now();
    const size_t n = events.size();
    size_t i = 0;
    for (;;) {
        for (size_t burst = 0; burst < kPacketsPerDatagram; ++burst) {
            process_event(events[i], cfg, ctx.fifo, ctx.hist, ctx.counters);
            if (++i == n) i = 0;
        }
        done += kPacketsPerDatagram;

        dgram.clear();
        PacketBytes p;
        while (ctx.fifo.pop(p)) dgram.insert(dgram.end(), p.begin(), p.end());

        if ((done & 0xffff) == 0 && seconds_since(t0) >= seconds) break;
    }
    return done;
}

}  // namespace

BenchResult run_bench(const BenchOptions& opt) {
    BenchResult res;

    // Phantom events across all crystals; every one passes the window so
    // the measured path is the longest one.
    PhantomSpec spec = PhantomSpec::standard(7, 65536);
    const PhantomStream stream = generate_events(spec);
    const SpuConfig cfg = make_phantom_config(spec);

    std::vector<RawEvent> events = stream.events;
    for (auto& ev : events) ev.block_id = 0;

    if (opt.verbose) std::printf("single-block phase (%.1f s)...\n", opt.seconds_per_phase);
    {
        BlockContext ctx;
        run_block(cfg, events, 0.5, ctx);  // warm-up
        const auto t0 = Clock::now();
        res.single_events = run_block(cfg, events, opt.seconds_per_phase, ctx);
        res.single_seconds = seconds_since(t0);
        res.single_eps = double(res.single_events) / res.single_seconds;
    }

    if (opt.verbose) std::printf("four-block phase (%.1f s)...\n", opt.seconds_per_phase);
    {
        std::array<std::unique_ptr<BlockContext>, 4> ctx;
        std::array<std::vector<RawEvent>, 4> per_block;
        for (int b = 0; b < 4; ++b) {
            ctx[b] = std::make_unique<BlockContext>();
            per_block[b] = events;
            for (auto& ev : per_block[b]) ev.block_id = uint8_t(b);
        }

        std::array<uint64_t, 4> counts{};
        const auto t0 = Clock::now();
        {
            std::vector<std::thread> threads;
            for (int b = 0; b < 4; ++b)
                threads.emplace_back([&, b] {
                    counts[b] = run_block(cfg, per_block[b], opt.seconds_per_phase, *ctx[b]);
                });
            for (auto& t : threads) t.join();
        }
        res.aggregate_seconds = seconds_since(t0);
        for (uint64_t c : counts) res.aggregate_events += c;
        res.aggregate_eps = double(res.aggregate_events) / res.aggregate_seconds;
    }

    res.single_pass = res.single_eps >= 1e6;
    res.aggregate_pass = res.aggregate_eps >= 4e6;
    return res;
}

std::string BenchResult::summary() const {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "single block:  %10.0f events/s  (%llu events in %.2f s)  [%s, floor 1.0e6]\n"
                  "four blocks:   %10.0f events/s  (%llu events in %.2f s)  [%s, floor 4.0e6]\n",
                  single_eps, static_cast<unsigned long long>(single_events), single_seconds,
                  single_pass ? "pass" : "FAIL", aggregate_eps,
                  static_cast<unsigned long long>(aggregate_events), aggregate_seconds,
                  aggregate_pass ? "pass" : "FAIL");
    return buf;
}

}  // namespace petspu
