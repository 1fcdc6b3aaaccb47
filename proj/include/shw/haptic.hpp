#pragma once

#include "shw/collision.hpp"
#include "shw/mesh.hpp"
#include "shw/putty.hpp"
#include "shw/rig.hpp"
#include "shw/tension.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace shw {

/// Immutable environment shared by the loop, replay and the service.
struct Scene {
    std::shared_ptr<const TriMesh> mesh;
    std::optional<SeamPath> seam;
    MixedProp prop = MixedProp::putty_gun();
};

struct HapticParams {
    double dt = 1e-3;  // s
    PenaltyGains gains;
    PuttyParams putty;
    /// Distance kept between a clamped tip and the surface it hit (m).
    double sweep_backoff = 1e-6;
    /// After a clamp, let the tangential part of the remaining motion through.
    bool tangential_slide = true;
    /// Bisection steps on the wrench scale when the full wrench is infeasible.
    int scale_iterations = 30;
};

struct HapticFrame {
    std::uint64_t tick = 0;
    double sim_time = 0.0;  // tick · dt
    /// Simulated grip pose after the swept-tip clamp.
    GripPose pose;
    /// Finite difference of the commanded pose (m/s, rad/s).
    Twist velocity = Twist::Zero();
    /// Set when the tip sweep hit the mesh this tick.
    std::optional<Contact> swept;
    std::vector<Contact> contacts;
    /// Contact wrench on the grip, torque about the tracked grip position.
    Wrench wrench = Wrench::Zero();
    Tensions tensions = Tensions::Zero();
    SolveStatus status = SolveStatus::Optimal;
    bool solver_ran = false;
    /// Fraction of `wrench` the tensions render; below 1 when the full wrench was infeasible.
    double wrench_scale = 1.0;
    bool scaled = false;
    bool trigger = false;
    std::vector<PuttySample> bead_delta;
    double junction_gap = 0.0;  // m
    double step_compute_time = 0.0;  // s, wall clock
};

/// The fixed-rate haptic controller loop. Phase order of one step:
///   1. velocity by finite difference of the commanded pose
///   2. tip sweep from the previous simulated tip, clamping at the time of impact
///   3. nose contact query at the simulated pose
///   4. penalty wrench
///   5. tension solve (A·t = wrench), radially scaled on infeasibility
///   6. putty extrusion while the trigger is held within putty radius of the mesh
///   7. frame emission
class HapticLoop {
public:
    HapticLoop(RigConfig rig, Scene scene, HapticParams params = {});

    HapticFrame step(const GripPose& commanded, bool trigger);

    std::uint64_t tick() const { return tick_; }
    const PuttyTrail& putty() const { return trail_; }
    const RigConfig& rig() const { return rig_; }
    const Scene& scene() const { return scene_; }
    const HapticParams& params() const { return params_; }

private:
    GripPose clamp_tip(const GripPose& commanded, std::optional<Contact>& swept) const;
    void render(const GripPose& commanded, HapticFrame& frame) const;

    RigConfig rig_;
    Scene scene_;
    HapticParams params_;
    PuttyTrail trail_;
    std::uint64_t tick_ = 0;
    std::optional<GripPose> last_commanded_;
    std::optional<GripPose> last_pose_;
};

}  // namespace shw
