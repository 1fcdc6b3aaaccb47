#include "shw/haptic.hpp"

#include "shw/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace shw {

namespace {

Twist finite_difference(const GripPose& from, const GripPose& to, double dt) {
    Twist v;
    v.head<3>() = (to.position() - from.position()) / dt;
    v.tail<3>() = rotation_vector_from_quat(to.orientation() * from.orientation().conjugate()) / dt;
    return v;
}

}  // namespace

HapticLoop::HapticLoop(RigConfig rig, Scene scene, HapticParams params)
    : rig_(std::move(rig)), scene_(std::move(scene)), params_(params), trail_(params.putty) {
    rig_.validate();
    if (!(params_.dt > 0.0) || !std::isfinite(params_.dt)) throw InvalidInput("haptic: dt must be positive");
    if (!(params_.gains.stiffness > 0.0)) throw InvalidInput("haptic: stiffness must be positive");
    if (!(params_.gains.damping >= 0.0)) throw InvalidInput("haptic: damping must be non-negative");
    if (params_.scale_iterations < 1) throw InvalidInput("haptic: scale_iterations must be at least 1");
}

GripPose HapticLoop::clamp_tip(const GripPose& commanded, std::optional<Contact>& swept) const {
    if (!scene_.mesh || !last_pose_) return commanded;
    const TriMesh& mesh = *scene_.mesh;
    const Vec3 start = last_pose_->transform(scene_.prop.tip);
    const Vec3 target = commanded.transform(scene_.prop.tip);
    auto outside = [&](const Vec3& p) { return mesh.signed_distance(p) >= 0.0; };

    Vec3 tip = target;
    const auto hit = sweep_tip(mesh, start, target);
    if (!hit) {
        // a crossing missed between facets: stay put
        if (!outside(target) && outside(start)) tip = start;
    } else if (hit->time_of_impact > 0.0) {
        swept = hit;
        const Vec3 d = target - start;
        const double len = d.norm();
        const double travel = std::max(0.0, hit->time_of_impact * len - params_.sweep_backoff);
        tip = start + (travel / len) * d;
        if (!outside(tip)) tip = hit->point + params_.sweep_backoff * hit->normal;
        if (!outside(tip)) tip = start;

        if (params_.tangential_slide) {
            Vec3 rest = target - tip;
            const double rn = rest.dot(hit->normal);
            if (rn < 0.0) rest -= rn * hit->normal;
            const double rest_len = rest.norm();
            if (rest_len > 0.0) {
                const Vec3 slide_to = tip + rest;
                const auto again = sweep_tip(mesh, tip, slide_to);
                Vec3 candidate = slide_to;
                if (again)
                    candidate = tip + (std::max(0.0, again->time_of_impact * rest_len - params_.sweep_backoff) /
                                       rest_len) * rest;
                if (outside(candidate)) tip = candidate;
            }
        }
    } else {
        // started inside: the penalty wrench pushes out, the pose is not clamped
        swept = hit;
    }
    GripPose out = commanded;
    out.set_position(commanded.position() + (tip - target));
    return out;
}

void HapticLoop::render(const GripPose& commanded, HapticFrame& frame) const {
    const StructureMatrix a = build_structure_matrix(rig_, commanded);
    const TensionBounds& bounds = rig_.tension;
    frame.solver_ran = true;
    const TensionSolveReport full = solve_tensions(a, frame.wrench, bounds);
    frame.status = full.status;
    if (full.feasible()) {
        frame.tensions = full.tensions;
        frame.wrench_scale = 1.0;
        return;
    }
    frame.scaled = true;
    frame.wrench_scale = 0.0;
    frame.tensions = Tensions::Constant(bounds.min);
    if (full.status != SolveStatus::Infeasible) return;

    TensionSolveReport best = solve_tensions(a, Wrench::Zero(), bounds);
    if (!best.feasible()) return;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < params_.scale_iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        TensionSolveReport r = solve_tensions(a, mid * frame.wrench, bounds);
        if (r.feasible()) {
            lo = mid;
            best = std::move(r);
        } else {
            hi = mid;
        }
    }
    frame.tensions = best.tensions;
    frame.wrench_scale = lo;
}

HapticFrame HapticLoop::step(const GripPose& commanded, bool trigger) {
    const auto t0 = std::chrono::steady_clock::now();
    HapticFrame frame;
    frame.tick = tick_;
    frame.sim_time = static_cast<double>(tick_) * params_.dt;
    frame.trigger = trigger;

    // 1
    if (last_commanded_) frame.velocity = finite_difference(*last_commanded_, commanded, params_.dt);
    // 2
    frame.pose = clamp_tip(commanded, frame.swept);
    // 3
    if (scene_.mesh) frame.contacts = query_contacts(*scene_.mesh, scene_.prop, frame.pose);
    // 4
    frame.wrench = contact_wrench(frame.contacts, commanded, frame.velocity, params_.gains);
    // 5
    render(commanded, frame);
    // 6
    const Vec3 tip = frame.pose.transform(scene_.prop.tip);
    const bool near = scene_.mesh && std::abs(scene_.mesh->signed_distance(tip)) <= params_.putty.radius;
    frame.bead_delta = trail_.extrude(tip, frame.sim_time, trigger && near);
    frame.junction_gap = handle_replica_state(scene_.prop, commanded).junction_gap;

    last_commanded_ = commanded;
    last_pose_ = frame.pose;
    ++tick_;
    frame.step_compute_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return frame;
}

}  // namespace shw
