#pragma once

#include "shw/types.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace shw {

struct StringRoute {
    std::size_t motor = 0;
    std::size_t attachment = 0;
};

struct TensionBounds {
    double min = 0.5;  // N
    double max = 30.0;  // N
    double mid() const { return 0.5 * (min + max); }
};

/// Geometry of the 8-string rig: motors at the vertices of a hexahedron, strings
/// attached in pairs to 4 points on a circle centred on the grip origin.
struct RigConfig {
    std::array<Vec3, kStringCount> motor_positions;
    double circle_diameter = 0.20;
    /// Indexed by string; each motor used once, each attachment twice.
    std::array<StringRoute, kStringCount> string_pairing;
    TensionBounds tension;
    /// Bounding size of the physical prop (m); 0 = not declared.
    double prop_size = 0.0;

    /// Attachment j sits at radius d/2, angle j·90° in the grip-local XY plane.
    std::array<Vec3, kAttachmentCount> attachment_offsets() const;

    /// Throws InvalidInput when an invariant is broken.
    void validate() const;
    /// Advisory messages (diameter outside 0.10-0.30 m, circle larger than twice the prop).
    std::vector<std::string> warnings() const;

    RigConfig with_diameter(double d) const {
        RigConfig r = *this;
        r.circle_diameter = d;
        return r;
    }

    Vec3 center() const;
    /// Axis-aligned bounds of the motor hexahedron.
    std::pair<Vec3, Vec3> bounds() const;
};

/// Default rig: 1.4 × 0.8 × 1.0 m box centred at the origin, 0.20 m circle,
/// attachment j routed to top motor j and bottom motor j+4 on the box corners at
/// azimuth 45° − 90°·j and −45° − 90°·j.
RigConfig default_rig();
/// Box rig with the default pairing and the given full extents.
RigConfig box_rig(const Vec3& extents, double circle_diameter = 0.20);

RigConfig load_rig(const std::filesystem::path& path);
RigConfig parse_rig_json(const std::string& text, const std::string& source = "<rig>");
std::string rig_to_json(const RigConfig& rig);
void save_rig(const RigConfig& rig, const std::filesystem::path& path);

/// World-frame attachment point of each string.
std::array<Vec3, kStringCount> attachment_points(const RigConfig& rig, const GripPose& pose);

StringLengths string_lengths(const RigConfig& rig, const GripPose& pose);

/// Column i = [u_i ; (R·r_i) × u_i], u_i the unit vector from attachment to motor.
StructureMatrix build_structure_matrix(const RigConfig& rig, const GripPose& pose);

/// Singular values of A in descending order.
Eigen::Matrix<double, 6, 1> singular_values(const StructureMatrix& a);
/// σ_max/σ_min, +∞ when A is numerically rank deficient.
double condition_number(const StructureMatrix& a);
int numerical_rank(const StructureMatrix& a, double tol = 1e-10);

}  // namespace shw
