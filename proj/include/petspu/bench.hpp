#pragma once

#include <cstdint>
#include <string>

namespace petspu {

// Regular-mode throughput measurement: the full per-event path from
// position calculation through packet encode and FIFO, drained in
// MTU-sized batches through the token ring. Floors follow the design
// targets: one million events per second per block, four million
// aggregate over four parallel block contexts.
struct BenchOptions {
    double seconds_per_phase = 10.0;
    bool verbose = true;
};

struct BenchResult {
    uint64_t single_events = 0;
    double single_seconds = 0;
    double single_eps = 0;

    uint64_t aggregate_events = 0;
    double aggregate_seconds = 0;
    double aggregate_eps = 0;

    bool single_pass = false;     // >= 1e6 events/s
    bool aggregate_pass = false;  // >= 4e6 events/s

    std::string summary() const;
};

BenchResult run_bench(const BenchOptions& opt);

}  // namespace petspu
