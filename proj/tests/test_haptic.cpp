#include "shw/errors.hpp"
#include "shw/haptic.hpp"
#include "shw/scenario.hpp"
#include "shw/tension.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace shw;

namespace {

constexpr double kPlateZ = -0.05;

Scene plate_scene() {
    Scene s;
    s.mesh = std::make_shared<const TriMesh>(make_plate(0.4, kPlateZ, 4));
    return s;
}

Scene panel_scene() {
    Scene s;
    s.mesh = std::make_shared<const TriMesh>(make_car_panel(72, 72));
    s.seam = car_panel_seam();
    return s;
}

// Grip descends 60 mm in 0.5 s: the tip goes from 20 mm above the plate to 10 mm below it.
ScenarioScript plate_descent() {
    ScenarioScript s;
    s.keys = {{0.0, GripPose::at(Vec3(0, 0, 0.12)), false},
              {0.5, GripPose::at(Vec3(0, 0, 0.09)), false},
              {0.7, GripPose::at(Vec3(0, 0, 0.09)), false}};
    return s;
}

double commanded_tip_z(std::uint64_t tick) {
    const double t = std::min(0.5, static_cast<double>(tick) * 1e-3);
    return 0.12 + (0.09 - 0.12) * (t / 0.5) - 0.15;
}

}  // namespace

TEST(HapticLoop, RejectsBadParameters) {
    HapticParams p;
    p.dt = 0.0;
    EXPECT_THROW(HapticLoop(default_rig(), plate_scene(), p), InvalidInput);
    p = {};
    p.gains.stiffness = -1;
    EXPECT_THROW(HapticLoop(default_rig(), plate_scene(), p), InvalidInput);
    p = {};
    p.gains.damping = -1;
    EXPECT_THROW(HapticLoop(default_rig(), plate_scene(), p), InvalidInput);
}

TEST(HapticLoop, FarFromMeshRunsOnPretension) {
    HapticLoop loop(default_rig(), plate_scene());
    // tip 100 mm above the plate
    const GripPose pose = GripPose::at(Vec3(0, 0, 0.2));
    const TensionSolveReport pre = pretension(build_structure_matrix(default_rig(), pose), default_rig().tension);
    for (int i = 0; i < 5; ++i) {
        const HapticFrame f = loop.step(pose, false);
        EXPECT_TRUE(f.contacts.empty());
        EXPECT_EQ(f.wrench, Wrench::Zero());
        EXPECT_TRUE(f.solver_ran);
        EXPECT_EQ(f.status, SolveStatus::Optimal);
        EXPECT_EQ(f.tensions, pre.tensions);
        EXPECT_TRUE(f.bead_delta.empty());
        EXPECT_EQ(f.tick, static_cast<std::uint64_t>(i));
        EXPECT_EQ(f.sim_time, i * 1e-3);
        EXPECT_EQ(f.junction_gap, 0.0);
    }
}

TEST(HapticLoop, VelocityFromCommandedPoses) {
    HapticLoop loop(default_rig(), Scene{});
    loop.step(GripPose::identity(), false);
    const HapticFrame f = loop.step(GripPose(Vec3(0.001, 0, 0), Quat(Eigen::AngleAxisd(0.002, Vec3::UnitZ()))), false);
    EXPECT_NEAR(f.velocity[0], 1.0, 1e-12);
    EXPECT_NEAR(f.velocity[5], 2.0, 1e-9);
}

TEST(HapticLoop, PlateDescentContactTicks) {
    const ScenarioResult r = run_scenario(plate_descent(), default_rig(), plate_scene());
    ASSERT_EQ(r.frames.size(), 701u);
    const double tip_radius = 0.004;

    // the tip sphere first overlaps the plate when the commanded tip is within 4 mm
    std::optional<std::uint64_t> first_contact, first_swept;
    for (const auto& f : r.frames) {
        if (!first_contact && !f.contacts.empty()) first_contact = f.tick;
        if (!first_swept && f.swept) first_swept = f.tick;
    }
    std::uint64_t want_contact = 0;
    while (commanded_tip_z(want_contact) - kPlateZ >= tip_radius) ++want_contact;
    std::uint64_t want_crossing = 0;
    while (commanded_tip_z(want_crossing) >= kPlateZ) ++want_crossing;
    ASSERT_TRUE(first_contact);
    ASSERT_TRUE(first_swept);
    EXPECT_EQ(*first_contact, want_contact);
    EXPECT_EQ(*first_swept, want_crossing);

    // the crossing tick is clamped at its time of impact
    const HapticFrame& hit = r.frames[*first_swept];
    const double z0 = commanded_tip_z(*first_swept - 1), z1 = commanded_tip_z(*first_swept);
    EXPECT_NEAR(hit.swept->time_of_impact, (z0 - kPlateZ) / (z0 - z1), 1e-9);
    EXPECT_NEAR(hit.pose.position().z() - 0.15, kPlateZ, 1e-5);

    for (const auto& f : r.frames) {
        if (f.tick < *first_swept) continue;
        const double tip_z = f.pose.position().z() - 0.15;
        const double overshoot = std::max(0.0, kPlateZ - commanded_tip_z(f.tick));
        EXPECT_GE(tip_z, kPlateZ - 1e-12) << f.tick;
        EXPECT_LE(kPlateZ - tip_z, overshoot) << f.tick;
        for (const auto& c : f.contacts) EXPECT_LE(c.depth, tip_radius + 1e-5) << f.tick;
        EXPECT_GT(f.wrench[2], 0.0);
    }
}

TEST(HapticLoop, ReactionConsistency) {
    const Scene scene = panel_scene();
    const ScenarioScript script = seam_following_script(*scene.seam, scene.prop);
    const ScenarioResult r = run_scenario(script, default_rig(), scene);
    std::size_t checked = 0;
    for (const auto& f : r.frames) {
        if (f.status != SolveStatus::Optimal || f.scaled) continue;
        const GripPose commanded = script.sample(f.sim_time).pose;
        const StructureMatrix a = build_structure_matrix(default_rig(), commanded);
        const double tol = 1e-6 * std::max(1.0, f.wrench.cwiseAbs().maxCoeff());
        EXPECT_LE((a * f.tensions - f.wrench).cwiseAbs().maxCoeff(), tol) << f.tick;
        ++checked;
    }
    EXPECT_EQ(checked, r.frames.size());
}

TEST(HapticLoop, OutOfWorkspaceFlagsInfeasible) {
    ScenarioScript s;
    s.keys = {{0.0, GripPose::identity(), false}, {0.3, GripPose::at(Vec3(0.66, 0.37, 0.46)), false}};
    const ScenarioResult r = run_scenario(s, default_rig(), Scene{});
    ASSERT_EQ(r.frames.size(), 301u);
    std::uint64_t infeasible = 0;
    for (const auto& f : r.frames) {
        const bool closed = pretension(build_structure_matrix(default_rig(), f.pose), default_rig().tension).feasible();
        EXPECT_EQ(f.status == SolveStatus::Optimal, closed) << f.tick;
        if (!closed) {
            EXPECT_TRUE(f.scaled);
            EXPECT_EQ(f.wrench_scale, 0.0);
            EXPECT_EQ(f.tensions, Tensions::Constant(default_rig().tension.min));
            ++infeasible;
        }
    }
    EXPECT_GT(infeasible, 0u);
    EXPECT_EQ(r.summary.infeasible_ticks, infeasible);
}

TEST(HapticLoop, OversizedWrenchIsScaledAlongItsDirection) {
    HapticParams p;
    p.gains.stiffness = 2e6;
    const ScenarioResult r = run_scenario(plate_descent(), default_rig(), plate_scene(), p);
    std::size_t scaled = 0;
    for (const auto& f : r.frames) {
        if (!f.scaled || f.status != SolveStatus::Infeasible) continue;
        ++scaled;
        EXPECT_GT(f.wrench_scale, 0.0);
        EXPECT_LT(f.wrench_scale, 1.0);
        const StructureMatrix a = build_structure_matrix(default_rig(), plate_descent().sample(f.sim_time).pose);
        const Wrench rendered = a * f.tensions;
        EXPECT_LE((rendered - f.wrench_scale * f.wrench).cwiseAbs().maxCoeff(), 1e-6 * f.wrench.norm());
        EXPECT_FALSE(solve_tensions(a, std::min(1.0, f.wrench_scale * 1.01) * f.wrench, default_rig().tension)
                         .feasible());
    }
    EXPECT_GT(scaled, 0u);
}

TEST(HapticLoop, PuttyOnlyNearSurfaceWithTrigger) {
    HapticLoop loop(default_rig(), plate_scene());
    // tip 20 mm above: trigger held, nothing extruded
    for (int i = 0; i < 5; ++i) EXPECT_TRUE(loop.step(GripPose::at(Vec3(0.001 * i, 0, 0.12)), true).bead_delta.empty());
    EXPECT_TRUE(loop.putty().beads().empty());
    // tip 2 mm above: extrudes
    for (int i = 0; i < 10; ++i) loop.step(GripPose::at(Vec3(0.002 * i, 0, 0.102)), true);
    ASSERT_EQ(loop.putty().beads().size(), 1u);
    EXPECT_EQ(loop.putty().beads()[0].samples.size(), 10u);
}

TEST(HapticLoop, CalibrationOffsetOnlyMovesJunctionGap) {
    Scene clean = panel_scene();
    Scene offset = clean;
    offset.prop.calibration_offset = GripPose(Vec3(0.003, -0.004, 0.0), Quat::Identity());
    const ScenarioScript script = seam_following_script(*clean.seam, clean.prop);
    ScenarioScript shortened = script;
    shortened.keys.resize(40);
    const ScenarioResult a = run_scenario(shortened, default_rig(), clean);
    const ScenarioResult b = run_scenario(shortened, default_rig(), offset);
    ASSERT_EQ(a.frames.size(), b.frames.size());
    for (std::size_t i = 0; i < a.frames.size(); ++i) {
        EXPECT_EQ(a.frames[i].contacts, b.frames[i].contacts);
        EXPECT_EQ(a.frames[i].pose, b.frames[i].pose);
        EXPECT_EQ(a.frames[i].tensions, b.frames[i].tensions);
        EXPECT_NEAR(b.frames[i].junction_gap, 0.005, 1e-12);
    }
}

TEST(NoTunneling, ClosedSphereRandomSteps) {
    Scene scene;
    scene.mesh = std::make_shared<const TriMesh>(make_icosphere(0.1, 3));
    scene.prop.nose = {Sphere{scene.prop.tip, 0.004}};
    HapticLoop loop(default_rig(), scene);
    std::mt19937_64 rng(51);
    std::normal_distribution<double> n;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vec3 tip(0.0, 0.0, 0.15);
    int inside = 0;
    for (int i = 0; i < 10000; ++i) {
        Vec3 step(n(rng), n(rng), n(rng));
        step *= 0.1 * u(rng) / step.norm();
        // clamping to a 0.3 m box around the sphere never lengthens the step
        tip = (tip + step).cwiseMax(-0.15).cwiseMin(0.15);
        const HapticFrame f = loop.step(GripPose::at(tip - scene.prop.tip), false);
        if (scene.mesh->signed_distance(f.pose.transform(scene.prop.tip)) < 0.0) ++inside;
    }
    EXPECT_EQ(inside, 0);
}

TEST(Scenario, EmptyScript) {
    Scene scene = panel_scene();
    const ScenarioResult r = run_scenario(ScenarioScript{}, default_rig(), scene);
    EXPECT_TRUE(r.frames.empty());
    EXPECT_EQ(r.log.size(), 0u);
    ASSERT_TRUE(r.summary.seam);
    EXPECT_EQ(r.summary.seam->coverage, 0.0);
}

TEST(Scenario, SeamFollowingCoverage) {
    const Scene scene = panel_scene();
    const ScenarioResult r = run_scenario(seam_following_script(*scene.seam, scene.prop), default_rig(), scene);
    ASSERT_TRUE(r.summary.seam);
    EXPECT_GE(r.summary.seam->coverage, 0.99);
    EXPECT_EQ(r.summary.seam->slip_events, 0);
    EXPECT_EQ(r.summary.infeasible_ticks, 0u);
    EXPECT_EQ(r.summary.beads, 1u);
}

TEST(Scenario, HalfOffSeam) {
    const Scene scene = panel_scene();
    const double tol = scene.seam->slip_tolerance;
    const ScenarioResult r =
        run_scenario(half_off_seam_script(*scene.seam, scene.prop, 2 * tol), default_rig(), scene);
    ASSERT_TRUE(r.summary.seam);
    EXPECT_NEAR(r.summary.seam->coverage, 0.5, 0.02);
    EXPECT_EQ(r.summary.seam->slip_events, 1);
}

TEST(Scenario, DeterministicDigestAndRateHonesty) {
    const ScenarioResult a = run_scenario(plate_descent(), default_rig(), plate_scene());
    const ScenarioResult b = run_scenario(plate_descent(), default_rig(), plate_scene());
    EXPECT_EQ(a.summary.digest, b.summary.digest);
    EXPECT_EQ(a.log.bytes(), b.log.bytes());
    EXPECT_EQ(a.summary.digest.size(), 64u);
    for (std::size_t i = 0; i < a.frames.size(); ++i) {
        EXPECT_EQ(a.frames[i].tick, i);
        EXPECT_EQ(a.frames[i].sim_time, static_cast<double>(i) * 1e-3);
    }
}

TEST(Scenario, LogParsesBackLosslessly) {
    const Scene scene = panel_scene();
    ScenarioScript script = seam_following_script(*scene.seam, scene.prop);
    script.keys.resize(30);
    const ScenarioResult r = run_scenario(script, default_rig(), scene);
    const auto back = FrameLog::parse(r.log.bytes());
    ASSERT_EQ(back.size(), r.frames.size());
    FrameLog again;
    for (const auto& f : back) again.append(f);
    EXPECT_EQ(again.bytes(), r.log.bytes());
    for (std::size_t i = 0; i < back.size(); ++i) {
        EXPECT_EQ(back[i].pose, r.frames[i].pose);
        EXPECT_EQ(back[i].contacts, r.frames[i].contacts);
        EXPECT_EQ(back[i].tensions, r.frames[i].tensions);
        EXPECT_EQ(back[i].bead_delta.size(), r.frames[i].bead_delta.size());
    }
}

TEST(Script, TextRoundTripAndSampling) {
    const Scene scene = panel_scene();
    const ScenarioScript s = seam_following_script(*scene.seam, scene.prop);
    const ScenarioScript back = parse_script(script_to_text(s));
    ASSERT_EQ(back.keys.size(), s.keys.size());
    for (std::size_t i = 0; i < s.keys.size(); ++i) {
        EXPECT_EQ(back.keys[i].time, s.keys[i].time);
        EXPECT_EQ(back.keys[i].pose.position(), s.keys[i].pose.position());
        EXPECT_LE(orientation_distance(back.keys[i].pose.orientation(), s.keys[i].pose.orientation()), 1e-15);
        EXPECT_EQ(back.keys[i].trigger, s.keys[i].trigger);
    }

    ScenarioScript lin;
    lin.keys = {{0.0, GripPose::at(Vec3(0, 0, 0)), false}, {1.0, GripPose::at(Vec3(1, 0, 0)), true}};
    EXPECT_NEAR(lin.sample(0.25).pose.position().x(), 0.25, 1e-15);
    EXPECT_FALSE(lin.sample(0.25).trigger);
    EXPECT_TRUE(lin.sample(1.0).trigger);
    EXPECT_EQ(lin.tick_count(1e-3), 1001u);
    lin.interpolation = Interpolation::Hold;
    EXPECT_EQ(lin.sample(0.75).pose.position().x(), 0.0);
}

TEST(Script, ErrorsCarryLineNumbers) {
    auto line_of = [](const std::string& text) -> std::size_t {
        try {
            parse_script(text, "s.txt");
        } catch (const ScriptError& e) {
            return e.line();
        }
        return 0;
    };
    EXPECT_EQ(line_of("interpolation linear\n0 0 0 0 1 0 0 0 0\n1 0 0 0 1 0 0 0\n"), 3u);
    EXPECT_EQ(line_of("0 0 0 0 1 0 0 0 0\n\n0.5 0 0 0 2 0 0 0 0\n"), 3u);
    EXPECT_EQ(line_of("1 0 0 0 1 0 0 0 0\n0.5 0 0 0 1 0 0 0 0\n"), 2u);
    EXPECT_EQ(line_of("0 0 0 0 1 0 0 0 2\n"), 1u);
    EXPECT_EQ(line_of("interpolation cubic\n"), 1u);
    EXPECT_EQ(line_of("0 0 0 0 1 0 0 0 0\ninterpolation hold\n"), 2u);
    EXPECT_EQ(line_of("0 0 x 0 1 0 0 0 0\n"), 1u);
    EXPECT_THROW(load_script("/nonexistent/script.txt"), ScriptError);
}

TEST(Script, BundledScriptsLoad) {
    const std::filesystem::path dir = SHW_DATA_DIR;
    for (const char* name : {"seam_follow.txt", "half_off.txt", "plate_descent.txt"}) {
        const ScenarioScript s = load_script(dir / "scripts" / name);
        EXPECT_GT(s.keys.size(), 1u) << name;
        EXPECT_NO_THROW(s.validate());
    }
}
