#include "shw/bridge.hpp"
#include "shw/config.hpp"
#include "shw/errors.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>

using namespace shw;
using nlohmann::json;

TEST(Config, DefaultsFromEmptyObject) {
    const AppConfig c = parse_config("{}");
    EXPECT_FALSE(c.rig);
    EXPECT_FALSE(c.mesh);
    EXPECT_EQ(c.udp_port, 47000);
    EXPECT_EQ(c.websocket_port, 47001);
    EXPECT_EQ(c.params.dt, 1e-3);
    EXPECT_EQ(c.bind_address, "127.0.0.1");
}

TEST(Config, ReadsEveryField) {
    const AppConfig c = parse_config(R"({
        "rig": "rig.json",
        "scene": {"mesh": "m.obj", "seam": "s.txt", "flip_winding": true, "slip_tolerance": 0.004,
                  "calibration_offset": {"position": [0.001, 0, 0]}},
        "gains": {"stiffness": 1500, "damping": 3},
        "dt": 0.002,
        "putty": {"radius": 0.003, "min_spacing": 0.001, "ring_segments": 8},
        "ports": {"udp": 0, "websocket": 0},
        "publish_every": 4,
        "light_direction": [0, 0.1, -1],
        "shadow_plane": {"normal": [0, 0, 1], "offset": 0.05},
        "initial_pose": {"position": [0, 0, 0.1]}
    })",
                                     "/base");
    EXPECT_EQ(*c.rig, std::filesystem::path("/base/rig.json"));
    EXPECT_EQ(*c.mesh, std::filesystem::path("/base/m.obj"));
    EXPECT_TRUE(c.flip_winding);
    EXPECT_EQ(c.slip_tolerance, 0.004);
    EXPECT_EQ(c.calibration_offset.position(), Vec3(0.001, 0, 0));
    EXPECT_EQ(c.params.gains.stiffness, 1500);
    EXPECT_EQ(c.params.gains.damping, 3);
    EXPECT_EQ(c.params.dt, 0.002);
    EXPECT_EQ(c.params.putty.ring_segments, 8);
    EXPECT_EQ(c.udp_port, 0);
    EXPECT_EQ(c.publish_every, 4);
    ASSERT_TRUE(c.shadow_plane);
    EXPECT_EQ(c.shadow_plane->offset, 0.05);
    EXPECT_EQ(c.initial_pose.position(), Vec3(0, 0, 0.1));
}

TEST(Config, RejectsBadInput) {
    EXPECT_THROW(parse_config("not json"), ParseError);
    EXPECT_THROW(parse_config("[]"), ParseError);
    EXPECT_THROW(parse_config(R"({"dt": 0})"), ParseError);
    EXPECT_THROW(parse_config(R"({"dt": "fast"})"), ParseError);
    EXPECT_THROW(parse_config(R"({"ports": {"udp": 70000}})"), ParseError);
    EXPECT_THROW(parse_config(R"({"publish_every": 0})"), ParseError);
    EXPECT_THROW(parse_config(R"({"light_direction": [1, 2]})"), ParseError);
    EXPECT_THROW(parse_config(R"({"initial_pose": {"quaternion": [2, 0, 0, 0]}})"), ParseError);
    EXPECT_THROW(load_config("/nonexistent/service.json"), ParseError);
}

TEST(Config, BundledConfigsLoad) {
    const std::filesystem::path data = SHW_DATA_DIR;
    for (const char* name : {"service.json", "plate.json"}) {
        const AppConfig c = load_config(data / name);
        const RigConfig rig = load_configured_rig(c);
        EXPECT_NO_THROW(rig.validate());
        const Scene scene = load_configured_scene(c);
        ASSERT_TRUE(scene.mesh) << name;
        EXPECT_GT(scene.mesh->triangle_count(), 0u);
    }
}

TEST(Bridge, CommandMatchesDatagramRules) {
    const auto p = parse_bridge_command(
        R"({"type":"command","seq":12,"position":[0.1,0.2,0.3],"quaternion":[1,0,0,0],"trigger":true})");
    ASSERT_TRUE(p);
    EXPECT_EQ(p->sequence, 12u);
    EXPECT_EQ(p->position[2], 0.3);
    EXPECT_EQ(p->trigger, 1);

    for (const char* bad : {
             "",
             "{}",
             "[1]",
             R"({"type":"state","seq":1,"position":[0,0,0],"quaternion":[1,0,0,0],"trigger":false})",
             R"({"type":"command","seq":-1,"position":[0,0,0],"quaternion":[1,0,0,0],"trigger":false})",
             R"({"type":"command","seq":4294967296,"position":[0,0,0],"quaternion":[1,0,0,0],"trigger":false})",
             R"({"type":"command","seq":1,"position":[0,0],"quaternion":[1,0,0,0],"trigger":false})",
             R"({"type":"command","seq":1,"position":[0,0,0],"quaternion":[1.1,0,0,0],"trigger":false})",
             R"({"type":"command","seq":1,"position":[0,0,0],"quaternion":[1,0,0,0],"trigger":1})",
             R"({"type":"command","seq":1,"position":["a",0,0],"quaternion":[1,0,0,0],"trigger":false})",
             R"({"type":"command","position":[0,0,0],"quaternion":[1,0,0,0],"trigger":false})",
         })
        EXPECT_FALSE(parse_bridge_command(bad)) << bad;
}

TEST(Bridge, StateCarriesDatagramFields) {
    wire::StatePacket p;
    p.tick = 42;
    p.sim_time = 0.042;
    p.tensions.fill(15.0);
    p.status = 0;
    p.contacts.push_back({{0.f, 0.f, 0.f}, {0.f, 0.f, 1.f}, 0.002f});
    p.bead_delta.push_back({0.1f, 0.2f, 0.3f});
    BridgeExtras e;
    e.scaled = true;
    e.wrench_scale = 0.5;
    e.shadow = {Vec3(0, 0, -0.1), Vec3(0.1, 0, -0.1)};
    const json j = json::parse(bridge_state_json(p, e));
    EXPECT_EQ(j["type"], "state");
    EXPECT_EQ(j["tick"], 42);
    EXPECT_EQ(j["tensions"].size(), 8u);
    EXPECT_EQ(j["pose"].size(), 7u);
    EXPECT_EQ(j["wrench"].size(), 6u);
    EXPECT_EQ(j["status_name"], "optimal");
    EXPECT_EQ(j["contacts"].size(), 1u);
    EXPECT_FLOAT_EQ(j["contacts"][0]["depth"].get<float>(), 0.002f);
    EXPECT_EQ(j["bead_delta"].size(), 1u);
    EXPECT_EQ(j["strings"].size(), 8u);
    EXPECT_EQ(j["shadow"].size(), 2u);
    EXPECT_EQ(j["scaled"], true);
    EXPECT_EQ(j["wrench_scale"], 0.5);

    p.status = wire::kStatusNotRun;
    EXPECT_EQ(json::parse(bridge_state_json(p, e))["status_name"], "not_run");
}

TEST(Bridge, HelloDescribesRigPropAndScene) {
    const AppConfig c = load_config(std::filesystem::path(SHW_DATA_DIR) / "service.json");
    const RigConfig rig = load_configured_rig(c);
    const Scene scene = load_configured_scene(c);
    const json j = json::parse(bridge_hello_json(c, rig, scene));
    EXPECT_EQ(j["type"], "hello");
    EXPECT_EQ(j["schema_version"], 1);
    EXPECT_EQ(j["rig"]["motor_positions"].size(), 8u);
    EXPECT_EQ(j["rig"]["string_pairing"].size(), 8u);
    EXPECT_EQ(j["rig"]["circle_diameter"], rig.circle_diameter);
    EXPECT_EQ(j["prop"]["nose"].size(), scene.prop.nose.size());
    EXPECT_EQ(j["mesh"]["triangles"].size(), 3 * scene.mesh->triangle_count());
    if (scene.seam) {
        EXPECT_EQ(j["seam"]["points"].size(), scene.seam->points.size());
    }
}

TEST(Bridge, ExtrasFollowFrame) {
    const RigConfig rig = default_rig();
    Scene scene;
    HapticFrame f;
    f.pose = GripPose::at(Vec3(0.05, 0, 0.1));
    f.wrench_scale = 0.25;
    f.scaled = true;
    const Plane plane{Vec3::UnitZ(), -0.2};
    const BridgeExtras e = make_bridge_extras(f, rig, scene, -Vec3::UnitZ(), plane, true);
    const auto att = attachment_points(rig, f.pose);
    for (std::size_t i = 0; i < kStringCount; ++i) {
        EXPECT_EQ(e.motors[i], rig.motor_positions[i]);
        EXPECT_EQ(e.attachments[i], att[i]);
    }
    EXPECT_EQ(e.wrench_scale, 0.25);
    EXPECT_TRUE(e.client_active);
    ASSERT_FALSE(e.shadow.empty());
    for (const auto& v : e.shadow) EXPECT_NEAR(v.z(), -0.2, 1e-12);
}
