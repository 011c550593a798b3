#include "petspu/pipeline.hpp"

namespace petspu {

const char* disposition_name(Disposition d) {
    switch (d) {
        case Disposition::Packaged: return "packaged";
        case Disposition::WindowRejected: return "window_rejected";
        case Disposition::Histogrammed: return "histogrammed";
        case Disposition::HistTerminated: return "hist_terminated";
        case Disposition::ZeroSumRejected: return "zero_sum_rejected";
        case Disposition::ClockUnderflow: return "clock_underflow";
        case Disposition::FifoDropped: return "fifo_dropped";
    }
    return "unknown";
}

SpuConfig make_default_config(uint8_t module_id) {
    SpuConfig cfg;
    cfg.module_id = module_id;
    const BoundaryClt boundary = decompose(make_uniform_grid_clt());
    PeakLut peaks;
    peaks.peaks.fill(1000);
    for (auto& b : cfg.blocks) {
        b.clt = boundary;
        b.peaks = peaks;
        b.times = TimeOffsetLut{};
    }
    return cfg;
}

}  // namespace petspu
