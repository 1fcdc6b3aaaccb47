#pragma once

#include "shw/haptic.hpp"
#include "shw/protocol.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace shw {

struct PoseCommand {
    GripPose pose;
    bool trigger = false;
};

/// Where the loop gets its commanded pose each tick.
class PoseSource {
public:
    virtual ~PoseSource() = default;
    virtual PoseCommand next(std::uint64_t tick, double sim_time) = 0;
};

class ConstantSource : public PoseSource {
public:
    explicit ConstantSource(PoseCommand command) : command_(command) {}
    PoseCommand next(std::uint64_t, double) override { return command_; }

private:
    PoseCommand command_;
};

enum class Interpolation { Linear, Hold };

struct ScriptKey {
    double time = 0.0;  // s
    GripPose pose;
    bool trigger = false;
};

/// Timestamped grip commands. Between keys the pose is held or interpolated
/// (linear position, slerp orientation); the trigger always holds the earlier key.
struct ScenarioScript {
    Interpolation interpolation = Interpolation::Linear;
    std::vector<ScriptKey> keys;

    /// Throws InvalidInput on decreasing timestamps or negative time.
    void validate() const;
    double duration() const { return keys.empty() ? 0.0 : keys.back().time; }
    /// Ticks needed to cover [0, duration] at dt; 0 for an empty script.
    std::uint64_t tick_count(double dt) const;
    PoseCommand sample(double t) const;
};

/// Text format, '#' starts a comment:
///   interpolation linear|hold
///   t x y z qw qx qy qz trigger
/// Throws ScriptError with the offending line number.
ScenarioScript parse_script(const std::string& text, const std::string& source = "<script>");
ScenarioScript load_script(const std::filesystem::path& path);
std::string script_to_text(const ScenarioScript& script);
void save_script(const ScenarioScript& script, const std::filesystem::path& path);

class ScriptedSource : public PoseSource {
public:
    explicit ScriptedSource(ScenarioScript script) : script_(std::move(script)) {}
    PoseCommand next(std::uint64_t, double sim_time) override { return script_.sample(sim_time); }

private:
    ScenarioScript script_;
};

struct ScenarioSummary {
    std::uint64_t ticks = 0;
    double max_force = 0.0;   // N, largest ‖wrench force‖
    double max_torque = 0.0;  // N·m
    std::uint64_t infeasible_ticks = 0;
    std::uint64_t numerical_failure_ticks = 0;
    std::uint64_t contact_ticks = 0;
    std::size_t beads = 0;
    std::size_t samples = 0;
    std::optional<SeamMetrics> seam;
    std::string digest;
};

struct ScenarioResult {
    std::vector<HapticFrame> frames;
    FrameLog log;
    std::vector<PuttyBead> beads;
    ScenarioSummary summary;
    /// Wall-clock step times, s; kept out of the log.
    std::vector<double> step_times;
};

/// Single-threaded replay: one step per dt over the script, no wall clock involved.
ScenarioResult run_scenario(const ScenarioScript& script, const RigConfig& rig, const Scene& scene,
                            const HapticParams& params = {});

std::string summary_to_json(const ScenarioSummary& summary, const std::vector<double>& step_times = {});

struct SeamScriptOptions {
    double hover = 0.001;            // m, tip clearance above the seam
    double speed = 0.05;             // m/s along the seam
    double approach_height = 0.03;   // m
    double approach_time = 0.5;      // s
    Quat orientation = Quat::Identity();
    Vec3 up = Vec3::UnitZ();
};

/// Approach the seam start, press, follow the seam at constant speed, release, lift.
ScenarioScript seam_following_script(const SeamPath& seam, const MixedProp& prop, const SeamScriptOptions& options = {});

/// Same as seam_following_script, but past half the seam length the tip jumps
/// sideways by `offset` (perpendicular to the seam, in the plane normal to `up`).
ScenarioScript half_off_seam_script(const SeamPath& seam, const MixedProp& prop, double offset,
                                    const SeamScriptOptions& options = {});

}  // namespace shw
