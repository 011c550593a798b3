#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "petspu/corrections.hpp"
#include "petspu/crystal_lut.hpp"
#include "petspu/histogram.hpp"
#include "petspu/pipeline.hpp"

namespace petspu {

// Downlink command set. Wire form per command:
//   opcode u8, module_id u8, block_id u8, opcode-specific payload (LE).
// A datagram carries zero or more commands back to back. Parsing stops at
// the first malformed command; the remainder of the datagram is dropped
// and counted, never fatal. Commands are idempotent, so retry over UDP
// is safe without an acknowledge protocol.
enum class Opcode : uint8_t {
    SetMode = 0x01,            // payload: mode u8
    SetEnergyWindow = 0x02,    // payload: low_kev u16, high_kev u16
    LoadBoundaryCltLine = 0x03,  // payload: direction u8 (0 = x, 1 = y), line u16, 22 x u16
    LoadPeakEntry = 0x04,      // payload: crystal u16, peak u16
    LoadTimeEntry = 0x05,      // payload: crystal u16, offset i32
    HistStart = 0x06,          // payload: histogram mode u8
    HistRead = 0x07,
    HistReset = 0x08,
    Status = 0x09,
};

struct SetModeCmd {
    Mode mode = Mode::RegularPackage;
};

struct SetEnergyWindowCmd {
    EnergyWindow window;
};

struct LoadCltLineCmd {
    uint8_t direction = 0;  // 0: x boundaries of line y, 1: y boundaries of line x
    uint16_t line = 0;      // 0..511
    std::array<uint16_t, kBoundariesPerLine> bounds{};
};

struct LoadPeakCmd {
    uint16_t crystal = 0;
    uint16_t peak = 0;
};

struct LoadTimeCmd {
    uint16_t crystal = 0;
    int32_t offset_ps = 0;
};

struct HistStartCmd {
    HistMode mode = HistMode::Flood;
};

struct HistReadCmd {};
struct HistResetCmd {};
struct StatusCmd {};

struct Command {
    uint8_t module_id = 0;
    uint8_t block_id = 0;
    std::variant<SetModeCmd, SetEnergyWindowCmd, LoadCltLineCmd, LoadPeakCmd, LoadTimeCmd,
                 HistStartCmd, HistReadCmd, HistResetCmd, StatusCmd>
        body;
};

void encode_command(std::vector<uint8_t>& out, const Command& cmd);

struct ParsedCommands {
    std::vector<Command> commands;
    uint32_t malformed = 0;  // 0 or 1: parsing stops at the first bad command
};

ParsedCommands parse_commands(std::span<const uint8_t> datagram);

// Host-side helpers: a full bring-up sequence for one SPU (energy window,
// mode, then every CLT line, peak and time entry of all four blocks), and
// packing of command lists into MTU-sized datagrams.
std::vector<Command> config_commands(const SpuConfig& cfg);
std::vector<std::vector<uint8_t>> pack_commands(std::span<const Command> cmds,
                                                size_t max_datagram = 1472);

}  // namespace petspu
