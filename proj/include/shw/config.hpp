#pragma once

#include "shw/haptic.hpp"
#include "shw/shadow.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace shw {

/// Service and replay configuration. Relative paths resolve against the config file's directory.
struct AppConfig {
    std::optional<std::filesystem::path> rig;   // default_rig() when absent
    std::optional<std::filesystem::path> mesh;  // no collision when absent
    bool flip_winding = false;
    std::optional<std::filesystem::path> seam;
    double slip_tolerance = 0.005;  // m
    GripPose calibration_offset;
    HapticParams params;

    std::string bind_address = "127.0.0.1";
    std::uint16_t udp_port = 47000;
    std::uint16_t websocket_port = 47001;
    int publish_every = 16;          // ticks between published frames
    double client_timeout = 1.0;     // s of command silence before the pose is held
    double subscriber_timeout = 5.0; // s before a silent datagram subscriber is dropped
    std::size_t egress_queue = 8;    // frames buffered for publishing; older ones are dropped
    std::optional<std::filesystem::path> static_dir;
    GripPose initial_pose = GripPose::at(Vec3(0.0, 0.0, 0.2));
    /// Shadow of the prop published with each frame; the plane defaults to the mesh floor.
    Vec3 light_direction = -Vec3::UnitZ();
    std::optional<Plane> shadow_plane;
};

AppConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".",
                       const std::string& source = "<config>");
AppConfig load_config(const std::filesystem::path& path);

RigConfig load_configured_rig(const AppConfig& config);
Scene load_configured_scene(const AppConfig& config);

}  // namespace shw
