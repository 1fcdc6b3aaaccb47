#pragma once

#include "shw/mesh.hpp"
#include "shw/rig.hpp"
#include "shw/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace shw::oracle {

inline GripPose random_pose(std::mt19937_64& rng, const Vec3& half_extent, double max_angle) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Vec3 p(u(rng) * half_extent.x(), u(rng) * half_extent.y(), u(rng) * half_extent.z());
    Vec3 axis(u(rng), u(rng), u(rng));
    while (axis.norm() < 1e-3) axis = Vec3(u(rng), u(rng), u(rng));
    const double angle = std::abs(u(rng)) * max_angle;
    return GripPose(p, Quat(Eigen::AngleAxisd(angle, axis.normalized())));
}

/// Central region of the default box: ±0.2 × ±0.12 × ±0.15 m, tilts up to 0.2 rad.
inline GripPose random_central_pose(std::mt19937_64& rng) {
    return random_pose(rng, Vec3(0.2, 0.12, 0.15), 0.2);
}

inline Wrench random_direction(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Wrench d;
    for (int i = 0; i < 6; ++i) d[i] = n(rng);
    return d.normalized();
}

inline StringLengths direct_lengths(const RigConfig& rig, const GripPose& pose) {
    const double r = 0.5 * rig.circle_diameter;
    const double angles[4] = {0.0, 0.5 * M_PI, M_PI, 1.5 * M_PI};
    const Mat3 R = pose.orientation().toRotationMatrix();
    StringLengths l;
    for (std::size_t i = 0; i < kStringCount; ++i) {
        const auto& route = rig.string_pairing[i];
        const double a = angles[route.attachment];
        const Vec3 local(r * std::cos(a), r * std::sin(a), 0.0);
        const Vec3 attach = pose.position() + R * local;
        const Vec3 m = rig.motor_positions[route.motor];
        l[i] = std::sqrt((m.x() - attach.x()) * (m.x() - attach.x()) + (m.y() - attach.y()) * (m.y() - attach.y()) +
                         (m.z() - attach.z()) * (m.z() - attach.z()));
    }
    return l;
}

/// Central finite differences of the string lengths with respect to grip position.
inline Eigen::Matrix<double, 8, 3> fd_position_gradient(const RigConfig& rig, const GripPose& pose, double h = 1e-6) {
    Eigen::Matrix<double, 8, 3> g;
    for (int k = 0; k < 3; ++k) {
        GripPose plus = pose, minus = pose;
        Vec3 e = Vec3::Zero();
        e[k] = h;
        plus.set_position(pose.position() + e);
        minus.set_position(pose.position() - e);
        g.col(k) = (direct_lengths(rig, plus) - direct_lengths(rig, minus)) / (2.0 * h);
    }
    return g;
}

struct EnumerationResult {
    bool feasible = false;
    Tensions tensions = Tensions::Zero();
    double objective = std::numeric_limits<double>::infinity();
    int candidates = 0;
};

/// Exhaustive active-set search: every tension is free, at its minimum or at its
/// maximum (3^8 patterns). Each pattern's equality-constrained least-squares
/// problem is solved in closed form; the best bound-feasible candidate wins.
inline EnumerationResult enumerate_active_sets(const StructureMatrix& a, const Wrench& w, double tmin, double tmax) {
    EnumerationResult best;
    const double mid = 0.5 * (tmin + tmax);
    const double eq_tol = 1e-9 * std::max(1.0, w.cwiseAbs().maxCoeff());
    const double bound_tol = 1e-9;
    int pattern[8];
    for (int code = 0; code < 6561; ++code) {
        int c = code, nfree = 0;
        for (int i = 0; i < 8; ++i) {
            pattern[i] = c % 3;
            c /= 3;
            nfree += pattern[i] == 0;
        }
        Tensions t = Tensions::Zero();
        Wrench rhs = w;
        Eigen::MatrixXd af(6, nfree);
        int col = 0;
        for (int i = 0; i < 8; ++i) {
            if (pattern[i] == 0) {
                af.col(col++) = a.col(i);
            } else {
                t[i] = pattern[i] == 1 ? tmin : tmax;
                rhs -= a.col(i) * t[i];
            }
        }
        if (nfree > 0) {
            const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(nfree, mid);
            const Eigen::VectorXd r = rhs - af * x0;
            const Eigen::VectorXd x = x0 + af.completeOrthogonalDecomposition().solve(r);
            col = 0;
            for (int i = 0; i < 8; ++i)
                if (pattern[i] == 0) t[i] = x[col++];
        }
        if ((a * t - w).cwiseAbs().maxCoeff() > eq_tol) continue;
        if ((t.array() < tmin - bound_tol).any() || (t.array() > tmax + bound_tol).any()) continue;
        ++best.candidates;
        const double obj = (t.array() - mid).matrix().squaredNorm();
        if (obj < best.objective) {
            best.objective = obj;
            best.tensions = t;
            best.feasible = true;
        }
    }
    return best;
}

inline double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 d = b - a;
    const double len2 = d.squaredNorm();
    double t = len2 > 0 ? (p - a).dot(d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (a + t * d - p).norm();
}

/// Plane projection with a barycentric inside test, else the nearest edge.
inline double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 e0 = b - a, e1 = c - a;
    Eigen::Matrix2d g;
    g << e0.dot(e0), e0.dot(e1), e0.dot(e1), e1.dot(e1);
    const Eigen::Vector2d rhs(e0.dot(p - a), e1.dot(p - a));
    const Eigen::Vector2d uv = g.ldlt().solve(rhs);
    if (uv[0] >= 0.0 && uv[1] >= 0.0 && uv[0] + uv[1] <= 1.0) return (a + uv[0] * e0 + uv[1] * e1 - p).norm();
    return std::min({point_segment_distance(p, a, b), point_segment_distance(p, b, c), point_segment_distance(p, c, a)});
}

inline double brute_force_distance(const TriMesh& mesh, const Vec3& p, std::size_t* tri = nullptr) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mesh.triangle_count(); ++i) {
        const auto c = mesh.corners(i);
        const double d = point_triangle_distance(p, c[0], c[1], c[2]);
        if (d < best) {
            best = d;
            if (tri) *tri = i;
        }
    }
    return best;
}

/// Inside test for a closed convex mesh: behind every face plane.
inline bool inside_convex(const TriMesh& mesh, const Vec3& p) {
    for (std::size_t i = 0; i < mesh.triangle_count(); ++i) {
        const auto c = mesh.corners(i);
        const Vec3 n = (c[1] - c[0]).cross(c[2] - c[0]);
        if (n.dot(p - c[0]) > 0.0) return false;
    }
    return true;
}

inline double convex_signed_distance(const TriMesh& mesh, const Vec3& p) {
    const double d = brute_force_distance(mesh, p);
    return inside_convex(mesh, p) ? -d : d;
}

}  // namespace shw::oracle
