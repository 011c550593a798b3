#pragma once

#include <optional>

#include "petspu/events.hpp"
#include "petspu/io_util.hpp"

namespace petspu {

// Which end-2 channel pair enters the y average. The production formula
// mixes (A1+B1) on end 1 with (C2+D2) on end 2; MatchedAb is the
// symmetric alternative using (A2+B2), selectable but off by default.
enum class End2YPair : uint8_t {
    CrossedCd = 0,
    MatchedAb = 1,
};

struct PositionResult {
    RawPosition pos;
    Doi doi;

    bool operator==(const PositionResult&) const = default;
};

// Center-of-gravity positioning. All arithmetic is exact rational on
// integer numerators/denominators; the only rounding is the final
// half-up quantization to 9 bits (x, y) and 4 bits (DOI).
//
//   x = 0.5*((a1+d1)/s1 + (a2+d2)/s2)
//   y = 0.5*((a1+b1)/s1 + (c2+d2)/s2)
//   doi = s1/(s1+s2)
//
// Returns nullopt when either end sums to zero (no position information).
inline std::optional<PositionResult> compute_position(const ChannelIntegrals& ch,
                                                      End2YPair y_pair = End2YPair::CrossedCd) {
    const uint64_t s1 = ch.sum1();
    const uint64_t s2 = ch.sum2();
    if (s1 == 0 || s2 == 0) return std::nullopt;

    // 0.5*(p/s1 + q/s2) == (p*s2 + q*s1) / (2*s1*s2); worst case fits u64:
    // numerator*2*511 < 2^47, denominator 2*s1*s2 < 2^38.
    const uint64_t xn = (uint64_t(ch.a1) + ch.d1) * s2 + (uint64_t(ch.a2) + ch.d2) * s1;
    const uint64_t yn2 = (y_pair == End2YPair::CrossedCd) ? uint64_t(ch.c2) + ch.d2
                                                          : uint64_t(ch.a2) + ch.b2;
    const uint64_t yn = (uint64_t(ch.a1) + ch.b1) * s2 + yn2 * s1;
    const uint64_t den = 2 * s1 * s2;

    PositionResult r;
    r.pos.x = static_cast<uint16_t>(scale_round(xn, den, 511));
    r.pos.y = static_cast<uint16_t>(scale_round(yn, den, 511));
    r.doi.value = static_cast<uint8_t>(scale_round(s1, s1 + s2, 15));
    return r;
}

}  // namespace petspu
