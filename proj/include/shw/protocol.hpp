#pragma once

#include "shw/haptic.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace shw::wire {

inline constexpr std::array<std::uint8_t, 4> kMagic{'S', 'H', 'W', '1'};

enum class PacketType : std::uint8_t { Command = 1, State = 2, Subscribe = 3 };

/// Status byte of a state packet when no tension solve ran.
inline constexpr std::uint8_t kStatusNotRun = 255;

struct CommandPacket {
    std::uint32_t sequence = 0;
    std::array<double, 3> position{};
    std::array<double, 4> quaternion{1.0, 0.0, 0.0, 0.0};  // w, x, y, z
    std::uint8_t trigger = 0;

    static constexpr std::size_t kSize = 4 + 1 + 4 + 3 * 8 + 4 * 8 + 1;

    GripPose pose() const;
    static CommandPacket from_pose(std::uint32_t sequence, const GripPose& pose, bool trigger);
    bool operator==(const CommandPacket&) const = default;
};

struct WireContact {
    std::array<float, 3> point{};
    std::array<float, 3> normal{};
    float depth = 0.0f;
    bool operator==(const WireContact&) const = default;
};

struct StatePacket {
    std::uint64_t tick = 0;
    double sim_time = 0.0;
    std::array<double, 7> pose{};  // x, y, z, qw, qx, qy, qz
    std::array<double, 6> wrench{};
    std::array<double, 8> tensions{};
    std::uint8_t status = kStatusNotRun;
    std::uint8_t trigger = 0;
    std::vector<WireContact> contacts;              // at most 255
    std::vector<std::array<float, 3>> bead_delta;   // at most 65535

    /// Contacts and bead samples beyond the count field widths are dropped.
    static StatePacket from_frame(const HapticFrame& frame);
    bool operator==(const StatePacket&) const = default;
};

std::vector<std::uint8_t> encode(const CommandPacket& p);
std::vector<std::uint8_t> encode(const StatePacket& p);
std::vector<std::uint8_t> encode_subscribe();

/// Type byte of a packet with a valid magic, or nothing.
std::optional<PacketType> peek_type(std::span<const std::uint8_t> bytes);

/// Strict parsers: wrong magic, type, length, non-finite values, a non-unit
/// quaternion or a trigger byte other than 0/1 yield nothing.
std::optional<CommandPacket> decode_command(std::span<const std::uint8_t> bytes);
std::optional<StatePacket> decode_state(std::span<const std::uint8_t> bytes);
bool decode_subscribe(std::span<const std::uint8_t> bytes);

}  // namespace shw::wire

namespace shw {

/// Lossless binary frame log: a sequence of u32-length-prefixed records, all
/// little-endian, every value at its full width. step_compute_time is not
/// recorded so that the log of a replay depends only on its inputs.
class FrameLog {
public:
    void append(const HapticFrame& frame);
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }
    std::size_t size() const { return records_; }

    /// Lowercase hex SHA-256 of bytes().
    std::string digest() const;

    static std::vector<HapticFrame> parse(std::span<const std::uint8_t> bytes);

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t records_ = 0;
};

std::string sha256_hex(std::span<const std::uint8_t> bytes);

/// One JSON object per line, numbers with round-trip precision.
std::string frames_to_jsonl(std::span<const HapticFrame> frames);

}  // namespace shw
