#pragma once

#include <cstdint>

namespace petspu {

// Per-block event accounting. Every ingested event lands in exactly one
// of the outcome counters, so they sum to ingested.
struct BlockCounters {
    uint64_t ingested = 0;
    uint64_t packaged = 0;
    uint64_t window_rejected = 0;
    uint64_t zero_sum = 0;
    uint64_t underflow = 0;
    uint64_t dropped = 0;
    uint64_t histogrammed = 0;
    uint64_t hist_terminated = 0;

    uint64_t outcome_sum() const {
        return packaged + window_rejected + zero_sum + underflow + dropped + histogrammed +
               hist_terminated;
    }

    bool operator==(const BlockCounters&) const = default;
};

}  // namespace petspu
