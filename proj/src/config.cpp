#include "shw/config.hpp"

#include "shw/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <limits>
#include <sstream>

namespace shw {

namespace {

using nlohmann::json;

Vec3 read_vec3(const json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 3) throw InvalidInput(key + ": expected [x, y, z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

GripPose read_pose(const json& j, const std::string& key) {
    if (!j.is_object()) throw InvalidInput(key + ": expected {position, quaternion}");
    Vec3 p = Vec3::Zero();
    Quat q = Quat::Identity();
    if (j.contains("position")) p = read_vec3(j["position"], key + ".position");
    if (j.contains("quaternion")) {
        const json& a = j["quaternion"];
        if (!a.is_array() || a.size() != 4) throw InvalidInput(key + ".quaternion: expected [w, x, y, z]");
        q = Quat(a[0].get<double>(), a[1].get<double>(), a[2].get<double>(), a[3].get<double>());
        if (std::abs(q.norm() - 1.0) > 1e-6) throw InvalidInput(key + ".quaternion: not unit");
    }
    return {p, q};
}

std::uint16_t read_port(const json& j, const std::string& key) {
    const auto v = j.get<long long>();
    if (v < 0 || v > 65535) throw InvalidInput(key + ": port out of range");
    return static_cast<std::uint16_t>(v);
}

}  // namespace

AppConfig parse_config(const std::string& text, const std::filesystem::path& base_dir, const std::string& source) {
    AppConfig c;
    try {
        const json j = json::parse(text);
        if (!j.is_object()) throw InvalidInput("top level must be an object");
        auto path_of = [&](const json& v) { return base_dir / std::filesystem::path(v.get<std::string>()); };
        if (j.contains("rig")) c.rig = path_of(j["rig"]);
        if (j.contains("scene")) {
            const json& s = j["scene"];
            if (s.contains("mesh")) c.mesh = path_of(s["mesh"]);
            if (s.contains("seam")) c.seam = path_of(s["seam"]);
            c.flip_winding = s.value("flip_winding", false);
            c.slip_tolerance = s.value("slip_tolerance", c.slip_tolerance);
            if (s.contains("calibration_offset")) c.calibration_offset = read_pose(s["calibration_offset"], "calibration_offset");
        }
        if (j.contains("gains")) {
            c.params.gains.stiffness = j["gains"].value("stiffness", c.params.gains.stiffness);
            c.params.gains.damping = j["gains"].value("damping", c.params.gains.damping);
        }
        c.params.dt = j.value("dt", c.params.dt);
        if (j.contains("putty")) {
            const json& p = j["putty"];
            c.params.putty.radius = p.value("radius", c.params.putty.radius);
            c.params.putty.min_spacing = p.value("min_spacing", c.params.putty.min_spacing);
            c.params.putty.ring_segments = p.value("ring_segments", c.params.putty.ring_segments);
        }
        c.params.tangential_slide = j.value("tangential_slide", c.params.tangential_slide);
        c.bind_address = j.value("bind_address", c.bind_address);
        if (j.contains("ports")) {
            const json& p = j["ports"];
            if (p.contains("udp")) c.udp_port = read_port(p["udp"], "ports.udp");
            if (p.contains("websocket")) c.websocket_port = read_port(p["websocket"], "ports.websocket");
        }
        c.publish_every = j.value("publish_every", c.publish_every);
        c.client_timeout = j.value("client_timeout", c.client_timeout);
        c.subscriber_timeout = j.value("subscriber_timeout", c.subscriber_timeout);
        c.egress_queue = j.value("egress_queue", c.egress_queue);
        if (j.contains("static_dir")) c.static_dir = path_of(j["static_dir"]);
        if (j.contains("light_direction")) c.light_direction = read_vec3(j["light_direction"], "light_direction");
        if (j.contains("shadow_plane")) {
            const json& sp = j["shadow_plane"];
            c.shadow_plane = Plane{read_vec3(sp.at("normal"), "shadow_plane.normal"), sp.value("offset", 0.0)};
        }
        if (j.contains("initial_pose")) c.initial_pose = read_pose(j["initial_pose"], "initial_pose");
    } catch (const json::exception& e) {
        throw ParseError(source, 0, e.what());
    } catch (const InvalidInput& e) {
        throw ParseError(source, 0, e.what());
    }
    if (!(c.params.dt > 0.0)) throw ParseError(source, 0, "dt must be positive");
    if (c.publish_every < 1) throw ParseError(source, 0, "publish_every must be at least 1");
    if (c.egress_queue < 1) throw ParseError(source, 0, "egress_queue must be at least 1");
    return c;
}

AppConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path(), path.string());
}

RigConfig load_configured_rig(const AppConfig& config) { return config.rig ? load_rig(*config.rig) : default_rig(); }

Scene load_configured_scene(const AppConfig& config) {
    Scene scene;
    if (config.mesh) {
        TriMesh::Options opts;
        opts.flip_winding = config.flip_winding;
        scene.mesh = std::make_shared<const TriMesh>(load_mesh(*config.mesh, opts));
    }
    if (config.seam) scene.seam = load_seam(*config.seam, config.slip_tolerance);
    scene.prop.calibration_offset = config.calibration_offset;
    return scene;
}

}  // namespace shw
