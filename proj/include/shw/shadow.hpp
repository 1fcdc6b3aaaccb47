#pragma once

#include "shw/types.hpp"

#include <span>
#include <vector>

namespace shw {

/// Points x with normal·x = offset.
struct Plane {
    Vec3 normal = Vec3::UnitZ();
    double offset = 0.0;

    static Plane ground(double height = 0.0) { return {Vec3::UnitZ(), height}; }
    double signed_distance(const Vec3& p) const { return normal.dot(p) - offset; }
};

/// Moves each vertex along `light_direction` onto the plane.
/// Throws DegenerateLight when the light is parallel to the plane.
std::vector<Vec3> project_shadow(std::span<const Vec3> vertices, const Vec3& light_direction, const Plane& plane);

}  // namespace shw
