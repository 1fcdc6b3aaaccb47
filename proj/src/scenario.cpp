#include "shw/scenario.hpp"

#include "shw/errors.hpp"
#include "shw/workspace.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace shw {

void ScenarioScript::validate() const {
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (!(keys[i].time >= 0.0) || !std::isfinite(keys[i].time))
            throw InvalidInput("script: key " + std::to_string(i) + " has an invalid time");
        if (i > 0 && keys[i].time < keys[i - 1].time)
            throw InvalidInput("script: key " + std::to_string(i) + " goes back in time");
    }
}

std::uint64_t ScenarioScript::tick_count(double dt) const {
    if (keys.empty()) return 0;
    // tolerance absorbs durations that are integer multiples of dt up to round-off
    return static_cast<std::uint64_t>(std::floor(duration() / dt + 1e-9)) + 1;
}

PoseCommand ScenarioScript::sample(double t) const {
    if (keys.empty()) return {};
    const auto it = std::upper_bound(keys.begin(), keys.end(), t,
                                     [](double v, const ScriptKey& k) { return v < k.time; });
    if (it == keys.begin()) return {keys.front().pose, keys.front().trigger};
    const ScriptKey& a = *(it - 1);
    if (interpolation == Interpolation::Hold || it == keys.end()) return {a.pose, a.trigger};
    const ScriptKey& b = *it;
    const double u = (t - a.time) / (b.time - a.time);
    const Vec3 p = a.pose.position() + u * (b.pose.position() - a.pose.position());
    const Quat q = a.pose.orientation().slerp(u, b.pose.orientation());
    return {GripPose(p, q), a.trigger};
}

ScenarioScript parse_script(const std::string& text, const std::string& source) {
    ScenarioScript script;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        if (tok[0] == "interpolation") {
            if (!script.keys.empty()) throw ScriptError(source, lineno, "interpolation must precede the first key");
            if (tok.size() != 2) throw ScriptError(source, lineno, "expected: interpolation linear|hold");
            if (tok[1] == "linear")
                script.interpolation = Interpolation::Linear;
            else if (tok[1] == "hold")
                script.interpolation = Interpolation::Hold;
            else
                throw ScriptError(source, lineno, "unknown interpolation '" + tok[1] + "'");
            continue;
        }
        if (tok.size() != 9) throw ScriptError(source, lineno, "expected 9 fields: t x y z qw qx qy qz trigger");
        double v[8];
        for (int i = 0; i < 8; ++i) {
            try {
                v[i] = parse_double(tok[i]);
            } catch (const std::exception&) {
                throw ScriptError(source, lineno, "bad number '" + tok[i] + "'");
            }
            if (!std::isfinite(v[i])) throw ScriptError(source, lineno, "non-finite value '" + tok[i] + "'");
        }
        if (tok[8] != "0" && tok[8] != "1") throw ScriptError(source, lineno, "trigger must be 0 or 1");
        const Quat q(v[4], v[5], v[6], v[7]);
        if (std::abs(q.norm() - 1.0) > 1e-6) throw ScriptError(source, lineno, "quaternion is not unit");
        if (v[0] < 0.0) throw ScriptError(source, lineno, "negative time");
        if (!script.keys.empty() && v[0] < script.keys.back().time)
            throw ScriptError(source, lineno, "timestamp decreases");
        script.keys.push_back({v[0], GripPose(Vec3(v[1], v[2], v[3]), q), tok[8] == "1"});
    }
    return script;
}

ScenarioScript load_script(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScriptError(path.string(), 0, "cannot open script");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_script(ss.str(), path.string());
}

std::string script_to_text(const ScenarioScript& script) {
    std::string out = "# t x y z qw qx qy qz trigger (s, m, unit quaternion)\n";
    out += script.interpolation == Interpolation::Linear ? "interpolation linear\n" : "interpolation hold\n";
    for (const auto& k : script.keys) {
        const Vec3& p = k.pose.position();
        const Quat& q = k.pose.orientation();
        for (double v : {k.time, p.x(), p.y(), p.z(), q.w(), q.x(), q.y(), q.z()}) out += format_double(v) + ' ';
        out += k.trigger ? "1\n" : "0\n";
    }
    return out;
}

void save_script(const ScenarioScript& script, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << script_to_text(script);
}

ScenarioResult run_scenario(const ScenarioScript& script, const RigConfig& rig, const Scene& scene,
                            const HapticParams& params) {
    script.validate();
    ScenarioResult result;
    HapticLoop loop(rig, scene, params);
    ScriptedSource source(script);
    const std::uint64_t n = script.tick_count(params.dt);
    result.frames.reserve(n);
    result.step_times.reserve(n);
    ScenarioSummary& s = result.summary;
    for (std::uint64_t i = 0; i < n; ++i) {
        const PoseCommand cmd = source.next(loop.tick(), static_cast<double>(loop.tick()) * params.dt);
        HapticFrame f = loop.step(cmd.pose, cmd.trigger);
        result.log.append(f);
        result.step_times.push_back(f.step_compute_time);
        s.max_force = std::max(s.max_force, f.wrench.head<3>().norm());
        s.max_torque = std::max(s.max_torque, f.wrench.tail<3>().norm());
        if (f.status == SolveStatus::Infeasible) ++s.infeasible_ticks;
        if (f.status == SolveStatus::NumericalFailure) ++s.numerical_failure_ticks;
        if (!f.contacts.empty()) ++s.contact_ticks;
        result.frames.push_back(std::move(f));
    }
    result.beads = loop.putty().beads();
    s.ticks = n;
    s.beads = result.beads.size();
    for (const auto& b : result.beads) s.samples += b.samples.size();
    if (scene.seam) s.seam = seam_metrics(result.beads, *scene.seam);
    s.digest = result.log.digest();
    return result;
}

std::string summary_to_json(const ScenarioSummary& s, const std::vector<double>& step_times) {
    nlohmann::ordered_json j;
    j["ticks"] = s.ticks;
    j["max_force_N"] = s.max_force;
    j["max_torque_Nm"] = s.max_torque;
    j["infeasible_ticks"] = s.infeasible_ticks;
    j["numerical_failure_ticks"] = s.numerical_failure_ticks;
    j["contact_ticks"] = s.contact_ticks;
    j["beads"] = s.beads;
    j["bead_samples"] = s.samples;
    if (s.seam) {
        j["coverage"] = s.seam->coverage;
        j["max_deviation_m"] = s.seam->max_deviation;
        j["slip_events"] = s.seam->slip_events;
    }
    j["log_sha256"] = s.digest;
    if (!step_times.empty()) {
        std::vector<double> t = step_times;
        std::sort(t.begin(), t.end());
        j["step_time_median_s"] = t[t.size() / 2];
        j["step_time_p99_s"] = t[std::min(t.size() - 1, static_cast<std::size_t>(0.99 * t.size()))];
        j["step_time_max_s"] = t.back();
    }
    return j.dump(2);
}

namespace {

struct SeamKeyPoint {
    Vec3 tip;
    double s;
};

ScenarioScript build_seam_script(const SeamPath& seam, const MixedProp& prop, const SeamScriptOptions& o,
                                 std::optional<double> offset) {
    seam.validate();
    if (!(o.speed > 0.0)) throw InvalidInput("seam script: speed must be positive");
    const Vec3 up = o.up.normalized();
    const double half = 0.5 * seam.length();
    auto grip_for_tip = [&](const Vec3& tip) {
        const GripPose g(Vec3::Zero(), o.orientation);
        return GripPose(tip - g.transform(prop.tip), o.orientation);
    };
    auto lateral = [&](std::size_t i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = std::min(i + 1, seam.points.size() - 1);
        Vec3 t = seam.points[hi] - seam.points[lo];
        t -= t.dot(up) * up;
        return Vec3(up.cross(t).normalized());
    };

    ScenarioScript script;
    script.interpolation = Interpolation::Linear;
    const Vec3 start = seam.points.front() + o.hover * up;
    script.keys.push_back({0.0, grip_for_tip(start + o.approach_height * up), false});
    script.keys.push_back({o.approach_time, grip_for_tip(start), false});

    const double t0 = o.approach_time;
    double s = 0.0;
    for (std::size_t i = 0; i < seam.points.size(); ++i) {
        if (i > 0) {
            const double s_prev = s;
            s += (seam.points[i] - seam.points[i - 1]).norm();
            if (offset && s_prev < half && s >= half) {
                // jump sideways at exactly half the seam length
                const double u = (half - s_prev) / (s - s_prev);
                const Vec3 mid = seam.points[i - 1] + u * (seam.points[i] - seam.points[i - 1]) + o.hover * up;
                const double tm = t0 + half / o.speed;
                script.keys.push_back({tm, grip_for_tip(mid), true});
                script.keys.push_back({tm, grip_for_tip(mid + *offset * lateral(i)), true});
            }
        }
        Vec3 tip = seam.points[i] + o.hover * up;
        if (offset && s >= half) tip += *offset * lateral(i);
        script.keys.push_back({t0 + s / o.speed, grip_for_tip(tip), true});
    }
    const ScriptKey last = script.keys.back();
    script.keys.push_back({last.time, last.pose, false});
    script.keys.push_back({last.time + o.approach_time,
                           GripPose(last.pose.position() + o.approach_height * up, o.orientation), false});
    return script;
}

}  // namespace

ScenarioScript seam_following_script(const SeamPath& seam, const MixedProp& prop, const SeamScriptOptions& options) {
    return build_seam_script(seam, prop, options, std::nullopt);
}

ScenarioScript half_off_seam_script(const SeamPath& seam, const MixedProp& prop, double offset,
                                    const SeamScriptOptions& options) {
    return build_seam_script(seam, prop, options, offset);
}

}  // namespace shw
