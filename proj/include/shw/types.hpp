#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <array>
#include <cstddef>

namespace shw {

inline constexpr std::size_t kStringCount = 8;
inline constexpr std::size_t kAttachmentCount = 4;

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;
using Mat3 = Eigen::Matrix3d;

/// Force (N, rows 0-2) and torque (N·m about the grip origin, rows 3-5).
using Wrench = Eigen::Matrix<double, 6, 1>;
/// Linear velocity (m/s, rows 0-2) and angular velocity (rad/s, rows 3-5).
using Twist = Eigen::Matrix<double, 6, 1>;
/// One tension per string, in newtons.
using Tensions = Eigen::Matrix<double, 8, 1>;
using StringLengths = Eigen::Matrix<double, 8, 1>;
/// Maps string tensions to the wrench applied to the grip: w = A·t.
using StructureMatrix = Eigen::Matrix<double, 6, 8>;

/// Pose of the grip (handle) in the world frame. The orientation is kept unit.
class GripPose {
public:
    GripPose() : position_(Vec3::Zero()), orientation_(Quat::Identity()) {}
    GripPose(const Vec3& position, const Quat& orientation)
        : position_(position), orientation_(orientation.normalized()) {}

    static GripPose identity() { return {}; }
    static GripPose at(const Vec3& position) { return {position, Quat::Identity()}; }
    /// Takes the quaternion bit-for-bit; the caller guarantees it is unit.
    static GripPose from_unit(const Vec3& position, const Quat& unit_orientation) {
        GripPose g;
        g.position_ = position;
        g.orientation_ = unit_orientation;
        return g;
    }

    const Vec3& position() const { return position_; }
    const Quat& orientation() const { return orientation_; }
    Mat3 rotation() const { return orientation_.toRotationMatrix(); }

    void set_position(const Vec3& p) { position_ = p; }
    void set_orientation(const Quat& q) { orientation_ = q.normalized(); }

    /// Grip-local point to world frame.
    Vec3 transform(const Vec3& local) const { return position_ + orientation_ * local; }

    /// this ∘ other: apply `other` in this pose's local frame.
    GripPose compose(const GripPose& other) const {
        return {transform(other.position_), orientation_ * other.orientation_};
    }

    GripPose inverse() const {
        const Quat qi = orientation_.conjugate();
        return {-(qi * position_), qi};
    }

    bool operator==(const GripPose& o) const {
        return position_ == o.position_ && orientation_.coeffs() == o.orientation_.coeffs();
    }

private:
    Vec3 position_;
    Quat orientation_;
};

/// Rotation vector (axis·angle) to quaternion.
Quat quat_from_rotation_vector(const Vec3& v);
/// Quaternion to rotation vector with angle in [0, π].
Vec3 rotation_vector_from_quat(const Quat& q);
/// Geodesic angle between two orientations (rad).
double orientation_distance(const Quat& a, const Quat& b);

inline Eigen::Matrix3d skew(const Vec3& v) {
    Eigen::Matrix3d m;
    m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
    return m;
}

}  // namespace shw
