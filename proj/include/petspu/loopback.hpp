#pragma once

#include <cstdint>
#include <string>

namespace petspu {

// One full SPU <-> DAQ-host session, both ends in-process. The uplink and
// downlink travel over real localhost UDP sockets unless use_udp is off,
// in which case datagrams are handed over directly.
struct LoopbackOptions {
    uint32_t events = 100000;
    uint64_t seed = 1;
    uint16_t noise = 0;
    bool use_udp = true;
    bool verbose = false;
    std::string out_dir;  // when set, writes flood PGM, spectra CSV, stats JSON
};

struct LoopbackReport {
    uint64_t events = 0;

    // regular-package phase
    uint64_t packaged = 0;
    uint64_t decoded_regular = 0;
    uint64_t decode_errors = 0;
    uint64_t truth_mismatches = 0;  // crystal id vs phantom ground truth
    uint64_t time_mismatches = 0;   // corrected time vs nominal clock

    // histogram phases
    uint64_t flood_mismatches = 0;    // online vs offline, below the ceiling
    uint64_t spectra_mismatches = 0;
    uint64_t online_flood_sum = 0;
    uint64_t offline_flood_sum = 0;

    uint64_t naks = 0;
    bool ok = false;
    std::string failure;  // first failed check, empty when ok

    std::string summary() const;
};

LoopbackReport run_loopback(const LoopbackOptions& opt);

}  // namespace petspu
