#include "shw/shadow.hpp"

#include "shw/errors.hpp"

#include <cmath>

namespace shw {

std::vector<Vec3> project_shadow(std::span<const Vec3> vertices, const Vec3& light_direction, const Plane& plane) {
    const double nn = plane.normal.norm();
    if (!(nn > 0.0) || !std::isfinite(nn)) throw InvalidInput("shadow: plane normal must be nonzero");
    const double dn = light_direction.norm();
    if (!(dn > 0.0) || !std::isfinite(dn)) throw InvalidInput("shadow: light direction must be nonzero");
    const Vec3 n = plane.normal / nn;
    const double c = plane.offset / nn;
    const Vec3 d = light_direction / dn;
    const double nd = n.dot(d);
    if (std::abs(nd) <= 1e-6) throw DegenerateLight("shadow: light direction parallel to the plane");

    std::vector<Vec3> out;
    out.reserve(vertices.size());
    for (const auto& x : vertices) {
        Vec3 p = x - ((n.dot(x) - c) / nd) * d;
        // one correction along the normal removes the residual left by rounding
        p -= (n.dot(p) - c) * n;
        out.push_back(p);
    }
    return out;
}

}  // namespace shw
