#include "shw/collision.hpp"

#include <algorithm>
#include <cmath>

namespace shw {

namespace {

constexpr double kNormalEps = 1e-12;

Contact contact_from_point(const TriMesh& mesh, const Vec3& center, double radius, double sd, const ClosestPoint& cp) {
    Contact c;
    c.point = cp.point;
    c.depth = radius - sd;
    const Vec3 d = center - cp.point;
    const double len = d.norm();
    if (len > kNormalEps)
        c.normal = (sd >= 0.0 ? d : Vec3(-d)) / len;
    else
        c.normal = mesh.feature_normal(cp).normalized();
    return c;
}

}  // namespace

MixedProp MixedProp::putty_gun() {
    MixedProp prop;
    prop.tip = Vec3(0, 0, -0.15);
    prop.nose_root = Vec3(0, 0, -0.05);
    prop.nose = {
        Sphere{prop.tip, 0.004},
        Capsule{Vec3(0, 0, -0.05), Vec3(0, 0, -0.125), 0.012},
        Capsule{Vec3(0, 0, -0.125), Vec3(0, 0, -0.142), 0.004},
    };
    return prop;
}

std::optional<Contact> sphere_contact(const TriMesh& mesh, const Sphere& sphere) {
    ClosestPoint cp;
    const double sd = mesh.signed_distance(sphere.center, &cp);
    if (sphere.radius - sd <= 0.0) return std::nullopt;
    return contact_from_point(mesh, sphere.center, sphere.radius, sd, cp);
}

std::optional<Contact> capsule_contact(const TriMesh& mesh, const Capsule& capsule) {
    const SegmentClosest seg = mesh.closest_to_segment(capsule.a, capsule.b);
    if (seg.distance >= capsule.radius) return std::nullopt;
    if (seg.distance > 1e-9) {
        ClosestPoint cp;
        const double sd = mesh.signed_distance(seg.segment_point, &cp);
        if (sd > 0.0) return contact_from_point(mesh, seg.segment_point, capsule.radius, sd, cp);
    }

    // The axis crosses the surface or lies inside: locate its deepest point.
    const Vec3 d = capsule.b - capsule.a;
    auto sd_at = [&](double t) { return mesh.signed_distance(capsule.a + t * d); };
    const int n = std::max(8, static_cast<int>(std::ceil(d.norm() / (0.25 * capsule.radius))));
    int best = 0;
    double best_sd = sd_at(0.0);
    for (int i = 1; i <= n; ++i) {
        const double v = sd_at(static_cast<double>(i) / n);
        if (v < best_sd) {
            best_sd = v;
            best = i;
        }
    }
    double lo = std::max(0, best - 1) / static_cast<double>(n);
    double hi = std::min(n, best + 1) / static_cast<double>(n);
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
    double f1 = sd_at(x1), f2 = sd_at(x2);
    for (int it = 0; it < 40; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kInvPhi * (hi - lo);
            f1 = sd_at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kInvPhi * (hi - lo);
            f2 = sd_at(x2);
        }
    }
    double t_best = static_cast<double>(best) / n;
    if (std::min(f1, f2) < best_sd) t_best = f1 < f2 ? x1 : x2;
    const Vec3 axis_pt = capsule.a + t_best * d;
    ClosestPoint cp;
    const double sd = mesh.signed_distance(axis_pt, &cp);
    if (capsule.radius - sd <= 0.0) return std::nullopt;
    return contact_from_point(mesh, axis_pt, capsule.radius, sd, cp);
}

std::vector<Contact> query_contacts(const TriMesh& mesh, const MixedProp& prop, const GripPose& pose) {
    std::vector<Contact> out;
    for (std::size_t i = 0; i < prop.nose.size(); ++i) {
        std::optional<Contact> c;
        if (const auto* s = std::get_if<Sphere>(&prop.nose[i]))
            c = sphere_contact(mesh, Sphere{pose.transform(s->center), s->radius});
        else if (const auto* k = std::get_if<Capsule>(&prop.nose[i]))
            c = capsule_contact(mesh, Capsule{pose.transform(k->a), pose.transform(k->b), k->radius});
        if (c) {
            c->primitive = i;
            out.push_back(*c);
        }
    }
    return out;
}

std::optional<Contact> sweep_tip(const TriMesh& mesh, const Vec3& start, const Vec3& end) {
    ClosestPoint cp;
    const double sd = mesh.signed_distance(start, &cp);
    if (sd < 0.0) {
        Contact c;
        c.point = cp.point;
        c.normal = mesh.feature_normal(cp).normalized();
        c.depth = -sd;
        c.time_of_impact = 0.0;
        return c;
    }
    const auto hit = mesh.first_hit(start, end);
    if (!hit) return std::nullopt;
    Contact c;
    c.point = hit->point;
    c.normal = mesh.face_normal(hit->triangle);
    c.depth = 0.0;
    c.time_of_impact = hit->t;
    return c;
}

Wrench contact_wrench(std::span<const Contact> contacts, const GripPose& pose, const Twist& velocity,
                      const PenaltyGains& gains) {
    Wrench w = Wrench::Zero();
    const Vec3 v = velocity.head<3>();
    const Vec3 omega = velocity.tail<3>();
    for (const auto& c : contacts) {
        const Vec3 lever = c.point - pose.position();
        const double vn = (v + omega.cross(lever)).dot(c.normal);
        const double magnitude = std::max(0.0, gains.stiffness * c.depth - gains.damping * vn);
        const Vec3 f = magnitude * c.normal;
        w.head<3>() += f;
        w.tail<3>() += lever.cross(f);
    }
    return w;
}

ReplicaState handle_replica_state(const MixedProp& prop, const GripPose& pose) {
    ReplicaState s;
    s.replica = pose.compose(prop.calibration_offset);
    s.junction_gap = (pose.transform(prop.nose_root) - s.replica.transform(prop.nose_root)).norm();
    return s;
}

}  // namespace shw
