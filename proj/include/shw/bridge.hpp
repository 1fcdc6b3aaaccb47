#pragma once

#include "shw/config.hpp"
#include "shw/protocol.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shw {

/// Values a browser needs beyond the datagram payload to draw a frame.
struct BridgeExtras {
    std::array<Vec3, kStringCount> motors;
    std::array<Vec3, kStringCount> attachments;
    GripPose replica;
    double junction_gap = 0.0;
    double wrench_scale = 1.0;
    bool scaled = false;
    /// Nose and handle polyline projected onto the shadow plane.
    std::vector<Vec3> shadow;
    bool client_active = false;
};

/// Shadow plane of a config: the configured one, else horizontal at the mesh floor.
Plane effective_shadow_plane(const AppConfig& config, const Scene& scene);

BridgeExtras make_bridge_extras(const HapticFrame& frame, const RigConfig& rig, const Scene& scene,
                                const Vec3& light_direction, const Plane& plane, bool client_active);

/// JSON "state" message: every datagram field under the same name, plus the extras.
std::string bridge_state_json(const wire::StatePacket& packet, const BridgeExtras& extras);

/// JSON "hello" message sent once per connection: rig, prop, mesh, seam, rates.
std::string bridge_hello_json(const AppConfig& config, const RigConfig& rig, const Scene& scene);

/// Parses a JSON "command" message; same validation as the datagram decoder.
std::optional<wire::CommandPacket> parse_bridge_command(std::string_view text);

}  // namespace shw
