#pragma once

#include <numbers>

namespace petspu {

// Event-rate and bandwidth budget of the twelve-module ring, used by the
// load generator, the benchmark floors and the `rates` subcommand.
struct RateParams {
    double detector_side_mm = 25.6;
    double ring_radius_mm = 55.0;
    double activity_bq = 7.4e6;        // 200 uCi
    double singles_per_decay = 2.0;    // two 511 keV photons per annihilation
    double detection_efficiency = 0.80;
    int blocks_per_module = 4;
    int modules = 12;
    int bytes_per_event = 16;
    double max_rate_per_block_hz = 1e6;  // 1 us dead-time bound
};

// Flat-panel solid-angle approximation: side^2 / (4 pi r^2).
inline double hit_probability(const RateParams& p) {
    return (p.detector_side_mm * p.detector_side_mm) /
           (4.0 * std::numbers::pi * p.ring_radius_mm * p.ring_radius_mm);
}

struct SystemRates {
    double singles_hz = 0;  // source singles rate
    double cr1_hz = 0;      // detected events, whole system
    double cr2_hz = 0;      // average per SPU
    double avg_mbps = 0;    // uplink at cr2
    double max_mbps = 0;    // uplink at the per-block rate ceiling
};

inline SystemRates system_rates(const RateParams& p) {
    SystemRates r;
    r.singles_hz = p.activity_bq * p.singles_per_decay;
    r.cr1_hz = r.singles_hz * (hit_probability(p) * p.blocks_per_module * p.modules) *
               p.detection_efficiency;
    r.cr2_hz = r.cr1_hz / p.modules;
    r.avg_mbps = r.cr2_hz * p.bytes_per_event * 8.0 / 1e6;
    r.max_mbps = p.max_rate_per_block_hz * p.blocks_per_module * p.bytes_per_event * 8.0 / 1e6;
    return r;
}

}  // namespace petspu
