#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "petspu/events.hpp"
#include "petspu/pipeline.hpp"

namespace petspu {

// Synthetic source with per-crystal ground truth. The light model is a
// bilinear split of each end's total across the four channels according
// to the crystal's centroid; it exists to exercise the digital pipeline
// end to end, not to model scintillation.
struct PhantomSpec {
    uint8_t module_id = 0;
    uint32_t events = 100000;
    uint64_t seed = 1;
    uint16_t noise = 0;  // per-channel uniform jitter amplitude, ADC counts

    std::array<double, kCrystalCount> centroid_x{};  // in [0,1]
    std::array<double, kCrystalCount> centroid_y{};
    std::array<uint16_t, kCrystalCount> gain{};       // photopeak raw sum
    std::array<int32_t, kCrystalCount> time_offset_ps{};
    double doi_fraction = 0.5;  // end-1 share of the light

    uint64_t t0_ps = 1'000'000;
    uint64_t period_ps = 1'000;  // nominal emission clock

    // Centroids at the uniform-grid region centers; gains spread across
    // columns so neighbouring crystals show distinct photopeaks; small
    // per-crystal time offsets.
    static PhantomSpec standard(uint64_t seed, uint32_t events, uint16_t noise = 0);
};

struct PhantomStream {
    std::vector<RawEvent> events;
    std::vector<uint16_t> truth_crystal;  // per event

    // Nominal (offset-free) emission time of event i; the corrected time
    // after the time LUT must equal this.
    uint64_t nominal_time(const PhantomSpec& spec, size_t i) const {
        return spec.t0_ps + spec.period_ps * i;
    }
};

// Deterministic for a given spec: same seed, same bytes.
PhantomStream generate_events(const PhantomSpec& spec);

// The matching SPU configuration: uniform-grid boundary CLTs, peak LUT
// equal to the per-crystal gains, time LUT cancelling the per-crystal
// offsets.
SpuConfig make_phantom_config(const PhantomSpec& spec);

}  // namespace petspu
