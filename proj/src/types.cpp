#include "shw/types.hpp"

#include <cmath>

namespace shw {

Quat quat_from_rotation_vector(const Vec3& v) {
    const double angle = v.norm();
    if (angle < 1e-12) {
        // second-order expansion keeps the map smooth through zero
        Quat q(1.0, 0.5 * v.x(), 0.5 * v.y(), 0.5 * v.z());
        return q.normalized();
    }
    return Quat(Eigen::AngleAxisd(angle, v / angle));
}

Vec3 rotation_vector_from_quat(const Quat& q_in) {
    Quat q = q_in.normalized();
    if (q.w() < 0.0) q.coeffs() = -q.coeffs();
    const Vec3 xyz = q.vec();
    const double s = xyz.norm();
    if (s < 1e-12) return 2.0 * xyz;
    const double angle = 2.0 * std::atan2(s, q.w());
    return xyz * (angle / s);
}

double orientation_distance(const Quat& a, const Quat& b) {
    return rotation_vector_from_quat(a.conjugate() * b).norm();
}

}  // namespace shw
