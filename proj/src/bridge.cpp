#include "shw/bridge.hpp"

#include "shw/errors.hpp"

#include <json.hpp>

#include <cmath>

namespace shw {

namespace {

using nlohmann::json;

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json pose_json(const GripPose& p) {
    const Quat& q = p.orientation();
    return {{"position", vec3_json(p.position())}, {"quaternion", {q.w(), q.x(), q.y(), q.z()}}};
}

std::string_view status_name(std::uint8_t s) {
    switch (s) {
        case 0: return "optimal";
        case 1: return "infeasible";
        case 2: return "numerical_failure";
        default: return "not_run";
    }
}

}  // namespace

Plane effective_shadow_plane(const AppConfig& config, const Scene& scene) {
    if (config.shadow_plane) return *config.shadow_plane;
    return Plane::ground(scene.mesh ? scene.mesh->bounds().lo.z() : 0.0);
}

BridgeExtras make_bridge_extras(const HapticFrame& frame, const RigConfig& rig, const Scene& scene,
                                const Vec3& light_direction, const Plane& plane, bool client_active) {
    BridgeExtras e;
    e.motors = rig.motor_positions;
    e.attachments = attachment_points(rig, frame.pose);
    const ReplicaState rs = handle_replica_state(scene.prop, frame.pose);
    e.replica = rs.replica;
    e.junction_gap = frame.junction_gap;
    e.wrench_scale = frame.wrench_scale;
    e.scaled = frame.scaled;
    e.client_active = client_active;

    std::vector<Vec3> outline{rs.replica.position(), rs.replica.transform(scene.prop.nose_root)};
    for (const auto& prim : scene.prop.nose) {
        if (const auto* c = std::get_if<Capsule>(&prim)) {
            outline.push_back(frame.pose.transform(c->a));
            outline.push_back(frame.pose.transform(c->b));
        }
    }
    outline.push_back(frame.pose.transform(scene.prop.tip));
    try {
        e.shadow = project_shadow(outline, light_direction, plane);
    } catch (const Error&) {
        e.shadow.clear();
    }
    return e;
}

std::string bridge_state_json(const wire::StatePacket& p, const BridgeExtras& e) {
    json j;
    j["type"] = "state";
    j["tick"] = p.tick;
    j["sim_time"] = p.sim_time;
    j["pose"] = p.pose;
    j["wrench"] = p.wrench;
    j["tensions"] = p.tensions;
    j["status"] = p.status;
    j["status_name"] = status_name(p.status);
    j["trigger"] = p.trigger;
    j["contacts"] = json::array();
    for (const auto& c : p.contacts)
        j["contacts"].push_back({{"point", c.point}, {"normal", c.normal}, {"depth", c.depth}});
    j["bead_delta"] = p.bead_delta;

    j["scaled"] = e.scaled;
    j["wrench_scale"] = e.wrench_scale;
    j["junction_gap"] = e.junction_gap;
    j["replica"] = pose_json(e.replica);
    j["strings"] = json::array();
    for (std::size_t i = 0; i < kStringCount; ++i)
        j["strings"].push_back({{"motor", vec3_json(e.motors[i])}, {"attachment", vec3_json(e.attachments[i])}});
    j["shadow"] = json::array();
    for (const auto& v : e.shadow) j["shadow"].push_back(vec3_json(v));
    j["client_active"] = e.client_active;
    return j.dump();
}

std::string bridge_hello_json(const AppConfig& config, const RigConfig& rig, const Scene& scene) {
    json j;
    j["type"] = "hello";
    j["schema_version"] = 1;
    j["dt"] = config.params.dt;
    j["publish_every"] = config.publish_every;

    json r;
    r["motor_positions"] = json::array();
    for (const auto& m : rig.motor_positions) r["motor_positions"].push_back(vec3_json(m));
    r["attachment_offsets"] = json::array();
    for (const auto& a : rig.attachment_offsets()) r["attachment_offsets"].push_back(vec3_json(a));
    r["string_pairing"] = json::array();
    for (const auto& s : rig.string_pairing) r["string_pairing"].push_back({s.motor, s.attachment});
    r["tension_min"] = rig.tension.min;
    r["tension_max"] = rig.tension.max;
    r["circle_diameter"] = rig.circle_diameter;
    j["rig"] = r;

    json prop;
    prop["tip"] = vec3_json(scene.prop.tip);
    prop["nose_root"] = vec3_json(scene.prop.nose_root);
    prop["calibration_offset"] = pose_json(scene.prop.calibration_offset);
    prop["nose"] = json::array();
    for (const auto& prim : scene.prop.nose) {
        if (const auto* s = std::get_if<Sphere>(&prim))
            prop["nose"].push_back({{"kind", "sphere"}, {"center", vec3_json(s->center)}, {"radius", s->radius}});
        else if (const auto* c = std::get_if<Capsule>(&prim))
            prop["nose"].push_back(
                {{"kind", "capsule"}, {"a", vec3_json(c->a)}, {"b", vec3_json(c->b)}, {"radius", c->radius}});
    }
    prop["putty_radius"] = config.params.putty.radius;
    prop["ring_segments"] = config.params.putty.ring_segments;
    j["prop"] = prop;

    if (scene.mesh) {
        json v = json::array(), t = json::array();
        for (const auto& p : scene.mesh->vertices())
            for (int i = 0; i < 3; ++i) v.push_back(p[i]);
        for (const auto& tri : scene.mesh->triangles())
            for (auto idx : tri) t.push_back(idx);
        j["mesh"] = {{"vertices", v}, {"triangles", t}};
    } else {
        j["mesh"] = nullptr;
    }
    if (scene.seam) {
        j["seam"] = {{"points", json::array()}, {"slip_tolerance", scene.seam->slip_tolerance}};
        for (const auto& p : scene.seam->points) j["seam"]["points"].push_back(vec3_json(p));
    } else {
        j["seam"] = nullptr;
    }
    const Plane plane = effective_shadow_plane(config, scene);
    j["shadow_plane"] = {{"normal", vec3_json(plane.normal)}, {"offset", plane.offset}};
    j["light_direction"] = vec3_json(config.light_direction);
    return j.dump();
}

std::optional<wire::CommandPacket> parse_bridge_command(std::string_view text) {
    const json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    try {
        if (j.at("type") != "command") return std::nullopt;
        const auto seq = j.at("seq").get<long long>();
        if (seq < 0 || seq > 0xffffffffLL) return std::nullopt;
        wire::CommandPacket p;
        p.sequence = static_cast<std::uint32_t>(seq);
        const json& pos = j.at("position");
        const json& q = j.at("quaternion");
        if (!pos.is_array() || pos.size() != 3 || !q.is_array() || q.size() != 4) return std::nullopt;
        for (int i = 0; i < 3; ++i) p.position[i] = pos[i].get<double>();
        for (int i = 0; i < 4; ++i) p.quaternion[i] = q[i].get<double>();
        const json& trig = j.at("trigger");
        if (!trig.is_boolean()) return std::nullopt;
        p.trigger = trig.get<bool>() ? 1 : 0;
        // identical acceptance rules to the datagram path
        return wire::decode_command(wire::encode(p));
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

}  // namespace shw
