#pragma once

#include "shw/mesh.hpp"
#include "shw/types.hpp"

#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace shw {

struct Sphere {
    Vec3 center = Vec3::Zero();
    double radius = 0.0;
};

struct Capsule {
    Vec3 a = Vec3::Zero();
    Vec3 b = Vec3::Zero();
    double radius = 0.0;
};

using NosePrimitive = std::variant<Sphere, Capsule>;

/// A prop whose handle is physical (tracked, held) and whose nose is virtual.
struct MixedProp {
    /// Collision primitives of the virtual nose, handle-local frame.
    std::vector<NosePrimitive> nose;
    /// Nozzle tip, handle-local; the point that lays putty and is swept each tick.
    Vec3 tip = Vec3::Zero();
    /// Junction between the physical handle and the virtual nose, handle-local.
    Vec3 nose_root = Vec3::Zero();
    /// Misregistration between the tracked handle and its displayed replica.
    GripPose calibration_offset;
    bool trigger = false;

    /// Putty gun: handle at the grip origin, nose pointing down −z to a tip 0.15 m away.
    static MixedProp putty_gun();

    Vec3 tip_world(const GripPose& pose) const { return pose.transform(tip); }
};

struct Contact {
    Vec3 point = Vec3::Zero();   // on the mesh surface
    Vec3 normal = Vec3::UnitZ();  // outward from the mesh
    double depth = 0.0;
    std::size_t primitive = 0;
    /// Fraction of the tick at which a swept contact occurs; 1 for end-of-tick contacts.
    double time_of_impact = 1.0;

    bool operator==(const Contact&) const = default;
};

/// Deepest penetration of one sphere (world frame) against the mesh, if any.
std::optional<Contact> sphere_contact(const TriMesh& mesh, const Sphere& sphere);
/// Deepest penetration of one capsule (world frame) against the mesh, if any.
std::optional<Contact> capsule_contact(const TriMesh& mesh, const Capsule& capsule);

/// One contact per penetrating nose primitive, in primitive order.
std::vector<Contact> query_contacts(const TriMesh& mesh, const MixedProp& prop, const GripPose& pose);

/// Earliest contact of the tip moving from `start` to `end` during one tick.
/// A start point already inside the mesh reports time_of_impact = 0.
std::optional<Contact> sweep_tip(const TriMesh& mesh, const Vec3& start, const Vec3& end);

struct PenaltyGains {
    double stiffness = 2000.0;  // N/m
    double damping = 5.0;       // N·s/m
};

/// Spring-damper penalty wrench on the grip from the contacts; normal force never adhesive.
Wrench contact_wrench(std::span<const Contact> contacts, const GripPose& pose, const Twist& velocity,
                      const PenaltyGains& gains);

struct ReplicaState {
    /// Frame of the displayed handle replica (used for shadows and rendering).
    GripPose replica;
    /// Distance between the nose root under the tracked pose and under the replica.
    double junction_gap = 0.0;
};

/// Collision never uses this: the nose follows the tracked pose; only the
/// handle replica carries the calibration offset.
ReplicaState handle_replica_state(const MixedProp& prop, const GripPose& pose);

}  // namespace shw
