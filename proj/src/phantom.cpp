#include "petspu/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace petspu {

namespace {

// Bounded draw via 128-bit multiply; keeps streams identical across
// standard libraries, unlike std::uniform_int_distribution.
uint64_t bounded(std::mt19937_64& rng, uint64_t n) {
    return uint64_t((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

uint16_t round_u16(double v) { return static_cast<uint16_t>(std::lround(v)); }

// Bilinear split of `total` over the four channels of one end. u is the
// x-fraction (A/D side), v the y-fraction (A/B side).
void split_end(uint32_t total, double u, double v, uint16_t& a, uint16_t& b, uint16_t& c,
               uint16_t& d) {
    a = round_u16(total * u * v);
    b = round_u16(total * (1.0 - u) * v);
    d = round_u16(total * u * (1.0 - v));
    int32_t rem = int32_t(total) - a - b - d;
    while (rem < 0) {  // rounding overshoot, at most a few counts
        uint16_t* biggest = &a;
        if (b > *biggest) biggest = &b;
        if (d > *biggest) biggest = &d;
        --*biggest;
        ++rem;
    }
    c = static_cast<uint16_t>(rem);
}

uint16_t jitter(std::mt19937_64& rng, uint16_t v, uint16_t amp) {
    if (amp == 0) return v;
    const int64_t delta = int64_t(bounded(rng, 2 * uint64_t(amp) + 1)) - amp;
    const int64_t out = int64_t(v) + delta;
    return static_cast<uint16_t>(std::clamp<int64_t>(out, 0, 65535));
}

}  // namespace

PhantomSpec PhantomSpec::standard(uint64_t seed, uint32_t events, uint16_t noise) {
    PhantomSpec s;
    s.seed = seed;
    s.events = events;
    s.noise = noise;
    for (int id = 0; id < kCrystalCount; ++id) {
        const int row = id / kGridSide, col = id % kGridSide;
        s.centroid_x[id] = (col + 0.5) / kGridSide;
        s.centroid_y[id] = (row + 0.5) / kGridSide;
        s.gain[id] = static_cast<uint16_t>(768 + 16 * col + row);
        s.time_offset_ps[id] = 100 * (id % 32);
    }
    return s;
}

PhantomStream generate_events(const PhantomSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    PhantomStream out;
    out.events.resize(spec.events);
    out.truth_crystal.resize(spec.events);

    for (uint32_t i = 0; i < spec.events; ++i) {
        const uint16_t crystal = static_cast<uint16_t>(bounded(rng, kCrystalCount));
        const uint32_t total = spec.gain[crystal];
        const uint32_t s1 = uint32_t(std::lround(total * spec.doi_fraction));
        const uint32_t s2 = total - s1;
        const double u = spec.centroid_x[crystal];
        const double v = spec.centroid_y[crystal];

        RawEvent& ev = out.events[i];
        ev.module_id = spec.module_id;
        ev.block_id = static_cast<uint8_t>(i % kBlocksPerModule);
        ChannelIntegrals& ch = ev.integrals;
        split_end(s1, u, v, ch.a1, ch.b1, ch.c1, ch.d1);
        split_end(s2, u, 1.0 - v, ch.a2, ch.b2, ch.c2, ch.d2);  // end 2 mirrored in y

        if (spec.noise > 0) {
            for (uint16_t* f : {&ch.a1, &ch.b1, &ch.c1, &ch.d1, &ch.a2, &ch.b2, &ch.c2, &ch.d2})
                *f = jitter(rng, *f, spec.noise);
        }

        const int64_t tdc =
            int64_t(spec.t0_ps + spec.period_ps * i) + spec.time_offset_ps[crystal];
        ev.tdc_time_ps = static_cast<uint64_t>(std::max<int64_t>(tdc, 0));
        out.truth_crystal[i] = crystal;
    }
    return out;
}

SpuConfig make_phantom_config(const PhantomSpec& spec) {
    SpuConfig cfg;
    cfg.module_id = spec.module_id;
    const BoundaryClt boundary = decompose(make_uniform_grid_clt());
    for (auto& b : cfg.blocks) {
        b.clt = boundary;
        std::copy(spec.gain.begin(), spec.gain.end(), b.peaks.peaks.begin());
        for (int id = 0; id < kCrystalCount; ++id)
            b.times.offsets[id] = -spec.time_offset_ps[id];
    }
    return cfg;
}

}  // namespace petspu
