#include "petspu/spu.hpp"

namespace petspu {

Spu::Spu(SpuConfig cfg) : cfg_(std::make_shared<const SpuConfig>(std::move(cfg))) {}

Disposition Spu::ingest(const RawEvent& ev) {
    const int block = ev.block_id & 0x3;
    return process_event(ev, *cfg_, fifos_[block], hists_[block], counters_[block]);
}

size_t Spu::pump_uplink(std::vector<std::vector<uint8_t>>& out, size_t max_datagrams) {
    size_t made = 0;

    while (made < max_datagrams && !control_out_.empty()) {
        out.push_back(std::move(control_out_.front()));
        control_out_.pop_front();
        ++made;
    }

    while (made < max_datagrams) {
        std::vector<uint8_t> dgram;
        dgram.reserve(kPacketsPerDatagram * 16);
        for (size_t i = 0; i < kPacketsPerDatagram; ++i) {
            auto grant = ring_.arbitrate(fifos_);
            if (!grant) break;
            dgram.insert(dgram.end(), grant->second.begin(), grant->second.end());
        }
        if (dgram.empty()) break;
        out.push_back(std::move(dgram));
        ++made;
    }
    return made;
}

bool Spu::uplink_idle() const {
    if (!control_out_.empty()) return false;
    for (const auto& f : fifos_)
        if (!f.empty()) return false;
    return true;
}

void Spu::handle_downlink(std::span<const uint8_t> datagram) {
    const ParsedCommands parsed = parse_commands(datagram);
    naks_ += parsed.malformed;

    // Config-mutating commands in one datagram are applied to a single
    // staged copy, swapped in once at the end.
    std::shared_ptr<SpuConfig> staged;
    for (const Command& cmd : parsed.commands) {
        if (cmd.module_id != cfg_->module_id) {
            ++naks_;
            continue;
        }
        apply_command(cmd, staged);
    }
    if (staged) cfg_ = std::move(staged);
}

void Spu::apply_command(const Command& cmd, std::shared_ptr<SpuConfig>& staged) {
    auto stage = [&]() -> SpuConfig& {
        if (!staged) staged = std::make_shared<SpuConfig>(*cfg_);
        return *staged;
    };

    if (const auto* m = std::get_if<SetModeCmd>(&cmd.body)) {
        stage().mode = m->mode;
    } else if (const auto* w = std::get_if<SetEnergyWindowCmd>(&cmd.body)) {
        stage().window = w->window;
    } else if (const auto* l = std::get_if<LoadCltLineCmd>(&cmd.body)) {
        BoundaryClt& clt = stage().blocks[cmd.block_id].clt;
        uint16_t* line = l->direction == 0 ? clt.x_line(l->line) : clt.y_line(l->line);
        std::copy(l->bounds.begin(), l->bounds.end(), line);
    } else if (const auto* p = std::get_if<LoadPeakCmd>(&cmd.body)) {
        stage().blocks[cmd.block_id].peaks.peaks[p->crystal] = p->peak;
    } else if (const auto* t = std::get_if<LoadTimeCmd>(&cmd.body)) {
        stage().blocks[cmd.block_id].times.offsets[t->crystal] = t->offset_ps;
    } else if (const auto* h = std::get_if<HistStartCmd>(&cmd.body)) {
        if (!hists_[cmd.block_id].start(h->mode)) ++naks_;  // already active
    } else if (std::holds_alternative<HistReadCmd>(cmd.body)) {
        queue_hist_readout(cmd.block_id);
    } else if (std::holds_alternative<HistResetCmd>(cmd.body)) {
        hists_[cmd.block_id].reset();
    } else if (std::holds_alternative<StatusCmd>(cmd.body)) {
        queue_status();
    }
}

void Spu::queue_hist_readout(int block) {
    // Accumulation is paused for the duration: the readout is produced
    // synchronously between events.
    const auto bins = hists_[block].read();
    uint16_t index = 0;
    for (size_t off = 0; off < bins.size(); off += kHistChunkBins, ++index) {
        const size_t count = std::min(kHistChunkBins, bins.size() - off);
        control_out_.push_back(
            encode_hist_chunk(uint8_t(block), index, bins.subspan(off, count)));
    }
    control_out_.push_back(encode_hist_chunk(uint8_t(block), index, {}));  // end marker
}

void Spu::queue_status() {
    for (int b = 0; b < kBlocksPerModule; ++b)
        control_out_.push_back(encode_status(cfg_->module_id, uint8_t(b), counters_[b]));
}

}  // namespace petspu
