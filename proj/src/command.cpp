#include "petspu/command.hpp"

#include "petspu/io_util.hpp"

namespace petspu {

namespace {

template <class T, class V>
constexpr bool holds(const V& v) {
    return std::holds_alternative<T>(v);
}

}  // namespace

void encode_command(std::vector<uint8_t>& out, const Command& cmd) {
    Opcode op;
    if (holds<SetModeCmd>(cmd.body)) op = Opcode::SetMode;
    else if (holds<SetEnergyWindowCmd>(cmd.body)) op = Opcode::SetEnergyWindow;
    else if (holds<LoadCltLineCmd>(cmd.body)) op = Opcode::LoadBoundaryCltLine;
    else if (holds<LoadPeakCmd>(cmd.body)) op = Opcode::LoadPeakEntry;
    else if (holds<LoadTimeCmd>(cmd.body)) op = Opcode::LoadTimeEntry;
    else if (holds<HistStartCmd>(cmd.body)) op = Opcode::HistStart;
    else if (holds<HistReadCmd>(cmd.body)) op = Opcode::HistRead;
    else if (holds<HistResetCmd>(cmd.body)) op = Opcode::HistReset;
    else op = Opcode::Status;

    out.push_back(static_cast<uint8_t>(op));
    out.push_back(cmd.module_id);
    out.push_back(cmd.block_id);

    if (const auto* m = std::get_if<SetModeCmd>(&cmd.body)) {
        out.push_back(static_cast<uint8_t>(m->mode));
    } else if (const auto* w = std::get_if<SetEnergyWindowCmd>(&cmd.body)) {
        put_le16(out, w->window.low_kev);
        put_le16(out, w->window.high_kev);
    } else if (const auto* l = std::get_if<LoadCltLineCmd>(&cmd.body)) {
        out.push_back(l->direction);
        put_le16(out, l->line);
        for (uint16_t b : l->bounds) put_le16(out, b);
    } else if (const auto* p = std::get_if<LoadPeakCmd>(&cmd.body)) {
        put_le16(out, p->crystal);
        put_le16(out, p->peak);
    } else if (const auto* t = std::get_if<LoadTimeCmd>(&cmd.body)) {
        put_le16(out, t->crystal);
        put_le32(out, static_cast<uint32_t>(t->offset_ps));
    } else if (const auto* h = std::get_if<HistStartCmd>(&cmd.body)) {
        out.push_back(static_cast<uint8_t>(h->mode));
    }
    // HistRead / HistReset / Status carry no payload.
}

ParsedCommands parse_commands(std::span<const uint8_t> d) {
    ParsedCommands out;
    size_t off = 0;

    auto have = [&](size_t n) { return off + n <= d.size(); };

    while (off < d.size()) {
        if (!have(3)) {
            out.malformed = 1;
            return out;
        }
        const uint8_t op = d[off];
        Command cmd;
        cmd.module_id = d[off + 1];
        cmd.block_id = d[off + 2];
        const uint8_t* p = &d[off + 3];
        if (cmd.module_id >= kModulesPerRing || cmd.block_id >= kBlocksPerModule) {
            out.malformed = 1;
            return out;
        }

        switch (op) {
            case static_cast<uint8_t>(Opcode::SetMode): {
                if (!have(4) || p[0] > static_cast<uint8_t>(Mode::EnergyOffline)) {
                    out.malformed = 1;
                    return out;
                }
                cmd.body = SetModeCmd{static_cast<Mode>(p[0])};
                off += 4;
                break;
            }
            case static_cast<uint8_t>(Opcode::SetEnergyWindow): {
                if (!have(7)) {
                    out.malformed = 1;
                    return out;
                }
                EnergyWindow w{get_le16(p), get_le16(p + 2)};
                if (w.low_kev > w.high_kev) {
                    out.malformed = 1;
                    return out;
                }
                cmd.body = SetEnergyWindowCmd{w};
                off += 7;
                break;
            }
            case static_cast<uint8_t>(Opcode::LoadBoundaryCltLine): {
                if (!have(3 + 3 + 2 * kBoundariesPerLine)) {
                    out.malformed = 1;
                    return out;
                }
                LoadCltLineCmd l;
                l.direction = p[0];
                l.line = get_le16(p + 1);
                if (l.direction > 1 || l.line >= kPlaneSide) {
                    out.malformed = 1;
                    return out;
                }
                uint16_t prev = 0;
                bool increasing = true;
                for (int i = 0; i < kBoundariesPerLine; ++i) {
                    l.bounds[i] = get_le16(p + 3 + 2 * i);
                    increasing &= l.bounds[i] > prev && l.bounds[i] < kPlaneSide;
                    prev = l.bounds[i];
                }
                if (!increasing) {
                    out.malformed = 1;
                    return out;
                }
                cmd.body = l;
                off += 3 + 3 + 2 * kBoundariesPerLine;
                break;
            }
            case static_cast<uint8_t>(Opcode::LoadPeakEntry): {
                if (!have(7)) {
                    out.malformed = 1;
                    return out;
                }
                LoadPeakCmd c{get_le16(p), get_le16(p + 2)};
                if (c.crystal >= kCrystalCount || c.peak == 0) {
                    out.malformed = 1;
                    return out;
                }
                cmd.body = c;
                off += 7;
                break;
            }
            case static_cast<uint8_t>(Opcode::LoadTimeEntry): {
                if (!have(9)) {
                    out.malformed = 1;
                    return out;
                }
                LoadTimeCmd c{get_le16(p), static_cast<int32_t>(get_le32(p + 2))};
                if (c.crystal >= kCrystalCount) {
                    out.malformed = 1;
                    return out;
                }
                cmd.body = c;
                off += 9;
                break;
            }
            case static_cast<uint8_t>(Opcode::HistStart): {
                if (!have(4) || p[0] > static_cast<uint8_t>(HistMode::EnergySpectrum)) {
                    out.malformed = 1;
                    return out;
                }
                cmd.body = HistStartCmd{static_cast<HistMode>(p[0])};
                off += 4;
                break;
            }
            case static_cast<uint8_t>(Opcode::HistRead):
                cmd.body = HistReadCmd{};
                off += 3;
                break;
            case static_cast<uint8_t>(Opcode::HistReset):
                cmd.body = HistResetCmd{};
                off += 3;
                break;
            case static_cast<uint8_t>(Opcode::Status):
                cmd.body = StatusCmd{};
                off += 3;
                break;
            default:
                out.malformed = 1;  // unknown opcode: rejected, not ignored
                return out;
        }
        out.commands.push_back(std::move(cmd));
    }
    return out;
}

std::vector<Command> config_commands(const SpuConfig& cfg) {
    std::vector<Command> cmds;
    cmds.reserve(2 + kBlocksPerModule * (2 * kPlaneSide + 2 * kCrystalCount));

    const uint8_t m = cfg.module_id;
    cmds.push_back({m, 0, SetEnergyWindowCmd{cfg.window}});
    cmds.push_back({m, 0, SetModeCmd{cfg.mode}});

    for (uint8_t b = 0; b < kBlocksPerModule; ++b) {
        const BlockConfig& bc = cfg.blocks[b];
        for (uint16_t line = 0; line < kPlaneSide; ++line) {
            for (uint8_t dir = 0; dir < 2; ++dir) {
                LoadCltLineCmd l;
                l.direction = dir;
                l.line = line;
                const uint16_t* src = dir == 0 ? bc.clt.x_line(line) : bc.clt.y_line(line);
                std::copy(src, src + kBoundariesPerLine, l.bounds.begin());
                cmds.push_back({m, b, l});
            }
        }
        for (uint16_t id = 0; id < kCrystalCount; ++id) {
            cmds.push_back({m, b, LoadPeakCmd{id, bc.peaks.peaks[id]}});
            cmds.push_back({m, b, LoadTimeCmd{id, bc.times.offsets[id]}});
        }
    }
    return cmds;
}

std::vector<std::vector<uint8_t>> pack_commands(std::span<const Command> cmds,
                                                size_t max_datagram) {
    std::vector<std::vector<uint8_t>> datagrams;
    std::vector<uint8_t> current;
    for (const Command& cmd : cmds) {
        std::vector<uint8_t> one;
        encode_command(one, cmd);
        if (!current.empty() && current.size() + one.size() > max_datagram) {
            datagrams.push_back(std::move(current));
            current.clear();
        }
        current.insert(current.end(), one.begin(), one.end());
    }
    if (!current.empty()) datagrams.push_back(std::move(current));
    return datagrams;
}

}  // namespace petspu
