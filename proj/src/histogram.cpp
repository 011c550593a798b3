#include "petspu/histogram.hpp"

namespace petspu {

std::atomic<int> BlockHistogram::live_buffers_{0};

}  // namespace petspu
