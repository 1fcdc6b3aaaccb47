#include "shw/bridge.hpp"
#include "shw/config.hpp"
#include "shw/errors.hpp"
#include "shw/kinematics.hpp"
#include "shw/scenario.hpp"
#include "shw/service.hpp"
#include "shw/shadow.hpp"
#include "shw/tension.hpp"
#include "shw/workspace.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

namespace {

using namespace shw;
using nlohmann::ordered_json;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInfeasible = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, std::size_t expected, const std::string& flag) {
    std::string s = text;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::vector<double> out;
    for (std::string tok; in >> tok;) {
        try {
            out.push_back(parse_double(tok));
        } catch (const std::exception&) {
            throw UsageError(flag + ": '" + tok + "' is not a number");
        }
        if (!std::isfinite(out.back())) throw UsageError(flag + ": values must be finite");
    }
    if (expected && out.size() != expected)
        throw UsageError(flag + ": expected " + std::to_string(expected) + " comma-separated values, got " +
                         std::to_string(out.size()));
    return out;
}

Vec3 parse_vec3(const std::string& s, const std::string& flag) {
    const auto v = parse_list(s, 3, flag);
    return {v[0], v[1], v[2]};
}

Quat parse_quat(const std::string& s, const std::string& flag) {
    const auto v = parse_list(s, 4, flag);
    const Quat q(v[0], v[1], v[2], v[3]);
    if (std::abs(q.norm() - 1.0) > 1e-6) throw UsageError(flag + ": quaternion (w,x,y,z) must be unit");
    return q;
}

std::string num(double v, int precision = 9) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

ordered_json json_num(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(path.string() + ": cannot open for writing");
    out << text;
    if (!out) throw Error(path.string() + ": write failed");
}

struct Globals {
    std::string format = "table";
    std::uint64_t seed = 0;
    std::string config;
    bool structured() const { return format == "structured"; }
};

std::optional<AppConfig> maybe_config(const Globals& g) {
    if (g.config.empty()) return std::nullopt;
    return load_config(g.config);
}

RigConfig rig_for(const Globals& g, const std::string& rig_path) {
    if (!rig_path.empty()) return load_rig(rig_path);
    if (auto c = maybe_config(g)) return load_configured_rig(*c);
    return default_rig();
}

void print_rig_warnings(const RigConfig& rig) {
    for (const auto& w : rig.warnings()) std::cerr << "warning: " << w << '\n';
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
    std::string rig, position, quaternion = "1,0,0,0", wrench = "0,0,0,0,0,0";
};

int cmd_solve(const Globals& g, const SolveArgs& a) {
    const RigConfig rig = rig_for(g, a.rig);
    print_rig_warnings(rig);
    const Vec3 p = a.position.empty() ? rig.center() : parse_vec3(a.position, "--position");
    const GripPose pose(p, parse_quat(a.quaternion, "--quaternion"));
    const auto wv = parse_list(a.wrench, 6, "--wrench");
    Wrench w;
    for (int i = 0; i < 6; ++i) w[i] = wv[i];
    const TensionSolveReport r = solve_tensions(build_structure_matrix(rig, pose), w, rig.tension);

    if (g.structured()) {
        ordered_json j;
        j["status"] = std::string(to_string(r.status));
        j["tensions_N"] = ordered_json::array();
        for (int i = 0; i < 8; ++i) j["tensions_N"].push_back(r.tensions[i]);
        j["residual_inf"] = json_num(r.residual_norm);
        j["objective_N2"] = json_num(r.objective);
        j["iterations"] = r.iterations;
        j["condition_number"] = json_num(r.condition_estimate);
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "status            " << to_string(r.status) << '\n';
        std::cout << "string  tension_N\n";
        for (int i = 0; i < 8; ++i) std::cout << i << "       " << num(r.tensions[i], 12) << '\n';
        std::cout << "residual_inf      " << num(r.residual_norm, 3) << '\n';
        std::cout << "objective_N2      " << num(r.objective) << '\n';
        std::cout << "condition_number  " << num(r.condition_estimate) << '\n';
    }
    return r.feasible() ? kOk : kInfeasible;
}

// ---------------------------------------------------------------- pose

struct PoseArgs {
    std::string rig, lengths, from_position, from_quaternion = "1,0,0,0", guess_position, guess_quaternion = "1,0,0,0";
    double noise = 0.0;
};

int cmd_pose(const Globals& g, const PoseArgs& a) {
    const RigConfig rig = rig_for(g, a.rig);
    StringLengths l;
    if (!a.lengths.empty() == !a.from_position.empty())
        throw UsageError("pose: give exactly one of --lengths or --from-position");
    if (!a.lengths.empty()) {
        const auto v = parse_list(a.lengths, 8, "--lengths");
        for (int i = 0; i < 8; ++i) l[i] = v[i];
    } else {
        const GripPose truth(parse_vec3(a.from_position, "--from-position"),
                             parse_quat(a.from_quaternion, "--from-quaternion"));
        l = string_lengths(rig, truth);
    }
    if (a.noise < 0.0) throw UsageError("--noise must be non-negative");
    if (a.noise > 0.0) {
        std::mt19937_64 rng(g.seed);
        std::uniform_real_distribution<double> u(-a.noise, a.noise);
        for (int i = 0; i < 8; ++i) l[i] += u(rng);
    }
    const Vec3 gp = a.guess_position.empty() ? rig.center() : parse_vec3(a.guess_position, "--guess-position");
    const PoseEstimate e = estimate_pose(rig, l, GripPose(gp, parse_quat(a.guess_quaternion, "--guess-quaternion")));
    const Vec3& p = e.pose.position();
    const Quat& q = e.pose.orientation();
    if (g.structured()) {
        ordered_json j;
        j["position_m"] = {p.x(), p.y(), p.z()};
        j["quaternion_wxyz"] = {q.w(), q.x(), q.y(), q.z()};
        j["residual_rms_m"] = e.residual_rms;
        j["iterations"] = e.iterations;
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "position_m       " << num(p.x(), 12) << ' ' << num(p.y(), 12) << ' ' << num(p.z(), 12) << '\n';
        std::cout << "quaternion_wxyz  " << num(q.w(), 12) << ' ' << num(q.x(), 12) << ' ' << num(q.y(), 12) << ' '
                  << num(q.z(), 12) << '\n';
        std::cout << "residual_rms_m   " << num(e.residual_rms, 3) << '\n';
        std::cout << "iterations       " << e.iterations << '\n';
    }
    return kOk;
}

// ---------------------------------------------------------------- workspace

struct WorkspaceArgs {
    std::string rig, lower, upper, resolution = "5,5,5", quaternion = "1,0,0,0", out_dir;
    unsigned threads = 0;
};

int cmd_workspace(const Globals& g, const WorkspaceArgs& a) {
    const RigConfig rig = rig_for(g, a.rig);
    print_rig_warnings(rig);
    GridSpec grid = GridSpec::centered(rig.center(), Vec3(0.6, 0.4, 0.4), {5, 5, 5});
    if (!a.lower.empty()) grid.lower = parse_vec3(a.lower, "--lower");
    if (!a.upper.empty()) grid.upper = parse_vec3(a.upper, "--upper");
    const auto res = parse_list(a.resolution, 3, "--resolution");
    for (int i = 0; i < 3; ++i) {
        if (res[i] < 1 || res[i] != std::floor(res[i])) throw UsageError("--resolution: positive integers expected");
        grid.resolution[i] = static_cast<int>(res[i]);
    }
    const WorkspaceReport report = analyze_workspace(rig, grid, parse_quat(a.quaternion, "--quaternion"), a.threads);
    if (!a.out_dir.empty()) {
        std::filesystem::create_directories(a.out_dir);
        write_text(std::filesystem::path(a.out_dir) / "workspace.csv", workspace_to_csv(report));
        write_text(std::filesystem::path(a.out_dir) / "workspace_summary.json", workspace_summary_json(report));
    }
    if (g.structured()) {
        std::cout << workspace_summary_json(report) << '\n';
        return kOk;
    }
    std::size_t closed = 0;
    double fmin = std::numeric_limits<double>::infinity(), tmin = fmin;
    for (const auto& c : report.cells) {
        if (!c.wrench_closed) continue;
        ++closed;
        fmin = std::min(fmin, c.force_capability);
        tmin = std::min(tmin, c.torque_capability);
    }
    std::cout << "cells                    " << report.cells.size() << '\n';
    std::cout << "wrench_closed            " << closed << '\n';
    std::cout << "feasible_fraction        " << num(report.feasible_fraction()) << '\n';
    std::cout << "min_force_capability_N   " << (closed ? num(fmin) : "-") << '\n';
    std::cout << "min_torque_capability_Nm " << (closed ? num(tmin) : "-") << '\n';
    return kOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    std::string rig, diameters, csv;
};

int cmd_sweep(const Globals& g, const SweepArgs& a) {
    const RigConfig rig = rig_for(g, a.rig);
    const auto d = parse_list(a.diameters, 0, "--diameters");
    if (d.empty()) throw UsageError("--diameters: at least one value required");
    const auto rows = diameter_sweep(rig, d);
    if (!a.csv.empty()) write_text(a.csv, sweep_to_csv(rows));
    if (g.structured()) {
        std::cout << sweep_to_json(rows) << '\n';
        return kOk;
    }
    std::cout << "diameter_m  condition_number  torque_capability_Nm\n";
    for (const auto& r : rows)
        std::cout << num(r.diameter) << "  " << num(r.condition_number) << "  " << num(r.torque_capability) << '\n';
    return kOk;
}

// ---------------------------------------------------------------- replay

struct ReplayArgs {
    std::string rig, mesh, seam, script, log, jsonl, summary, beads, tube_obj;
    bool flip_winding = false;
};

std::string beads_json(const std::vector<PuttyBead>& beads) {
    ordered_json j;
    j["beads"] = ordered_json::array();
    for (const auto& b : beads) {
        ordered_json jb;
        jb["radius_m"] = b.radius;
        jb["arc_length_m"] = b.arc_length();
        jb["samples"] = ordered_json::array();
        for (const auto& s : b.samples)
            jb["samples"].push_back({s.position.x(), s.position.y(), s.position.z(), s.time});
        j["beads"].push_back(jb);
    }
    return j.dump(1);
}

int cmd_replay(const Globals& g, const ReplayArgs& a) {
    AppConfig cfg = maybe_config(g).value_or(AppConfig{});
    if (!a.rig.empty()) cfg.rig = a.rig;
    if (!a.mesh.empty()) cfg.mesh = a.mesh;
    if (!a.seam.empty()) cfg.seam = a.seam;
    if (a.flip_winding) cfg.flip_winding = true;
    const RigConfig rig = load_configured_rig(cfg);
    print_rig_warnings(rig);
    const Scene scene = load_configured_scene(cfg);
    const ScenarioScript script = load_script(a.script);
    const ScenarioResult r = run_scenario(script, rig, scene, cfg.params);

    if (!a.log.empty()) {
        std::ofstream out(a.log, std::ios::binary);
        if (!out) throw Error(a.log + ": cannot open for writing");
        out.write(reinterpret_cast<const char*>(r.log.bytes().data()), static_cast<std::streamsize>(r.log.bytes().size()));
    }
    if (!a.jsonl.empty()) write_text(a.jsonl, frames_to_jsonl(r.frames));
    if (!a.summary.empty()) write_text(a.summary, summary_to_json(r.summary, r.step_times) + "\n");
    if (!a.beads.empty()) write_text(a.beads, beads_json(r.beads) + "\n");
    if (!a.tube_obj.empty()) {
        std::vector<Vec3> v;
        std::vector<TriIndices> t;
        for (const auto& b : r.beads) {
            const auto base = static_cast<std::uint32_t>(v.size());
            v.insert(v.end(), b.tube_vertices.begin(), b.tube_vertices.end());
            for (auto tri : b.tube_triangles) t.push_back({tri[0] + base, tri[1] + base, tri[2] + base});
        }
        write_obj(a.tube_obj, v, t);
    }

    const ScenarioSummary& s = r.summary;
    if (g.structured()) {
        std::cout << summary_to_json(s) << '\n';
        return kOk;
    }
    std::cout << "ticks                    " << s.ticks << '\n';
    std::cout << "max_force_N              " << num(s.max_force) << '\n';
    std::cout << "max_torque_Nm            " << num(s.max_torque) << '\n';
    std::cout << "infeasible_ticks         " << s.infeasible_ticks << '\n';
    std::cout << "numerical_failure_ticks  " << s.numerical_failure_ticks << '\n';
    std::cout << "contact_ticks            " << s.contact_ticks << '\n';
    std::cout << "beads                    " << s.beads << '\n';
    std::cout << "bead_samples             " << s.samples << '\n';
    if (s.seam) {
        std::cout << "coverage                 " << num(s.seam->coverage, 6) << '\n';
        std::cout << "max_deviation_m          " << num(s.seam->max_deviation, 6) << '\n';
        std::cout << "slip_events              " << s.seam->slip_events << '\n';
    }
    std::cout << "log_sha256               " << s.digest << '\n';
    return kOk;
}

// ---------------------------------------------------------------- serve

struct ServeArgs {
    double duration = 0.0;
    int udp_port = -1, ws_port = -1;
    std::string bind, static_dir;
};

int cmd_serve(const Globals& g, const ServeArgs& a) {
    AppConfig cfg = maybe_config(g).value_or(AppConfig{});
    auto port = [](int p, const char* flag) {
        if (p < 0 || p > 65535) throw UsageError(std::string(flag) + ": port out of range");
        return static_cast<std::uint16_t>(p);
    };
    if (a.udp_port != -1) cfg.udp_port = port(a.udp_port, "--udp-port");
    if (a.ws_port != -1) cfg.websocket_port = port(a.ws_port, "--ws-port");
    if (!a.bind.empty()) cfg.bind_address = a.bind;
    if (!a.static_dir.empty()) cfg.static_dir = a.static_dir;
    const RigConfig rig = load_configured_rig(cfg);
    print_rig_warnings(rig);
    Service service(cfg, rig, load_configured_scene(cfg));
    service.start();
    std::cout << "listening udp=" << cfg.bind_address << ':' << service.udp_port()
              << " websocket=" << cfg.bind_address << ':' << service.websocket_port() << std::endl;
    service.wait(a.duration > 0.0 ? std::optional<double>(a.duration) : std::nullopt);
    service.stop();
    const ServiceStats s = service.stats();
    if (g.structured()) {
        ordered_json j{{"ticks", s.ticks},
                       {"frames_published", s.frames_published},
                       {"frames_dropped", s.frames_dropped},
                       {"datagrams_received", s.datagrams_received},
                       {"commands_accepted", s.commands_accepted},
                       {"malformed", s.malformed},
                       {"overruns", s.overruns}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "ticks             " << s.ticks << '\n'
                  << "frames_published  " << s.frames_published << '\n'
                  << "frames_dropped    " << s.frames_dropped << '\n'
                  << "datagrams         " << s.datagrams_received << '\n'
                  << "commands          " << s.commands_accepted << '\n'
                  << "malformed         " << s.malformed << '\n'
                  << "overruns          " << s.overruns << '\n';
    }
    return kOk;
}

// ---------------------------------------------------------------- shadow

struct ShadowArgs {
    std::string mesh, out, light = "0,0,-1", plane = "0,0,1,0";
    bool flip_winding = false;
};

int cmd_shadow(const Globals& g, const ShadowArgs& a) {
    TriMesh::Options opts;
    opts.flip_winding = a.flip_winding;
    const TriMesh mesh = load_mesh(a.mesh, opts);
    const auto pv = parse_list(a.plane, 4, "--plane");
    const Plane plane{Vec3(pv[0], pv[1], pv[2]), pv[3]};
    const auto projected = project_shadow(mesh.vertices(), parse_vec3(a.light, "--light"), plane);
    const std::filesystem::path out(a.out);
    if (out.extension() == ".stl")
        write_binary_stl(out, projected, mesh.triangles());
    else if (out.extension() == ".obj")
        write_obj(out, projected, mesh.triangles());
    else
        throw UsageError("--out: extension must be .obj or .stl");
    double worst = 0.0;
    const Vec3 n = plane.normal.normalized();
    const double c = plane.offset / plane.normal.norm();
    for (const auto& p : projected) worst = std::max(worst, std::abs(n.dot(p) - c));
    if (g.structured()) {
        std::cout << ordered_json{{"vertices", projected.size()}, {"triangles", mesh.triangle_count()},
                                  {"max_plane_residual_m", worst}, {"output", a.out}}
                         .dump(2)
                  << '\n';
    } else {
        std::cout << "vertices              " << projected.size() << '\n'
                  << "triangles             " << mesh.triangle_count() << '\n'
                  << "max_plane_residual_m  " << num(worst, 3) << '\n'
                  << "output                " << a.out << '\n';
    }
    return kOk;
}

// ---------------------------------------------------------------- assets

int cmd_assets(const Globals&, const std::string& dir_text) {
    const std::filesystem::path dir(dir_text);
    std::filesystem::create_directories(dir / "scripts");
    const RigConfig rig = default_rig();
    save_rig(rig, dir / "rig_default.json");

    const TriMesh panel = make_car_panel(72, 72);
    write_obj(dir / "car_panel.obj", panel.vertices(), panel.triangles());
    const SeamPath seam = car_panel_seam(0.002);
    save_seam(seam, dir / "seam.txt");
    const TriMesh plate = make_plate(0.4, -0.05, 4);
    write_obj(dir / "plate.obj", plate.vertices(), plate.triangles());

    const MixedProp prop = MixedProp::putty_gun();
    save_script(seam_following_script(seam, prop), dir / "scripts" / "seam_follow.txt");
    save_script(half_off_seam_script(seam, prop, 2.0 * seam.slip_tolerance), dir / "scripts" / "half_off.txt");

    // straight descent: tip from 20 mm above the plate to 10 mm below it in 0.5 s, then held
    ScenarioScript descent;
    const Vec3 above(0.0, 0.0, -0.05 + 0.02 + 0.15), below(0.0, 0.0, -0.05 - 0.01 + 0.15);
    descent.keys = {{0.0, GripPose::at(above), false}, {0.5, GripPose::at(below), false}, {0.7, GripPose::at(below), false}};
    save_script(descent, dir / "scripts" / "plate_descent.txt");

    ordered_json service{{"rig", "rig_default.json"},
                         {"scene", {{"mesh", "car_panel.obj"}, {"seam", "seam.txt"}, {"slip_tolerance", 0.005}}},
                         {"gains", {{"stiffness", 2000.0}, {"damping", 5.0}}},
                         {"dt", 0.001},
                         {"putty", {{"radius", 0.004}, {"min_spacing", 0.002}, {"ring_segments", 8}}},
                         {"bind_address", "127.0.0.1"},
                         {"ports", {{"udp", 47000}, {"websocket", 47001}}},
                         {"publish_every", 16},
                         {"client_timeout", 1.0},
                         {"initial_pose", {{"position", {0.0, 0.0, 0.2}}, {"quaternion", {1.0, 0.0, 0.0, 0.0}}}}};
    write_text(dir / "service.json", service.dump(2) + "\n");
    ordered_json plate_cfg{{"rig", "rig_default.json"}, {"scene", {{"mesh", "plate.obj"}}}, {"dt", 0.001}};
    write_text(dir / "plate.json", plate_cfg.dump(2) + "\n");
    std::cout << "wrote assets to " << dir.string() << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stringed haptic workbench: tension solving, pose estimation, workspace analysis, replay and service"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"table", "structured"}));
    app.add_option("--seed", g.seed, "Seed for randomized sampling");
    app.add_option("--config", g.config, "Service/replay config file (JSON)");

    std::function<int()> action;

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Tensions for a wrench at a pose");
    s->add_option("--rig", solve.rig, "Rig file (JSON)");
    s->add_option("--position", solve.position, "Grip position x,y,z (m); default rig centre");
    s->add_option("--quaternion", solve.quaternion, "Grip orientation w,x,y,z");
    s->add_option("--wrench", solve.wrench, "fx,fy,fz,tx,ty,tz (N, N·m)");
    s->callback([&] { action = [&] { return cmd_solve(g, solve); }; });

    PoseArgs pose;
    auto* p = app.add_subcommand("pose", "Grip pose from string lengths");
    p->add_option("--rig", pose.rig, "Rig file (JSON)");
    p->add_option("--lengths", pose.lengths, "l0,...,l7 (m)");
    p->add_option("--from-position", pose.from_position, "Synthesize lengths from this position x,y,z (m)");
    p->add_option("--from-quaternion", pose.from_quaternion, "Orientation used with --from-position");
    p->add_option("--noise", pose.noise, "Uniform length noise half-width (m), drawn from --seed");
    p->add_option("--guess-position", pose.guess_position, "Initial guess x,y,z (m); default rig centre");
    p->add_option("--guess-quaternion", pose.guess_quaternion, "Initial guess orientation w,x,y,z");
    p->callback([&] { action = [&] { return cmd_pose(g, pose); }; });

    WorkspaceArgs ws;
    auto* w = app.add_subcommand("workspace", "Wrench-closure and capability over a grid");
    w->add_option("--rig", ws.rig, "Rig file (JSON)");
    w->add_option("--lower", ws.lower, "Grid lower corner x,y,z (m)");
    w->add_option("--upper", ws.upper, "Grid upper corner x,y,z (m)");
    w->add_option("--resolution", ws.resolution, "Cells per axis nx,ny,nz");
    w->add_option("--quaternion", ws.quaternion, "Grip orientation w,x,y,z");
    w->add_option("--threads", ws.threads, "Worker threads (0 = all cores)");
    w->add_option("--out-dir", ws.out_dir, "Write workspace.csv and workspace_summary.json here");
    w->callback([&] { action = [&] { return cmd_workspace(g, ws); }; });

    SweepArgs sweep;
    auto* sw = app.add_subcommand("sweep", "Conditioning and torque capability per circle diameter");
    sw->add_option("--rig", sweep.rig, "Rig file (JSON)");
    sw->add_option("--diameters", sweep.diameters, "Ascending diameters d0,d1,... (m)")->required();
    sw->add_option("--csv", sweep.csv, "Also write the table as CSV");
    sw->callback([&] { action = [&] { return cmd_sweep(g, sweep); }; });

    ReplayArgs replay;
    auto* r = app.add_subcommand("replay", "Run a scenario script through the haptic loop");
    r->add_option("--script", replay.script, "Scenario script")->required();
    r->add_option("--rig", replay.rig, "Rig file (JSON)");
    r->add_option("--mesh", replay.mesh, "Car-body mesh (.obj/.stl)");
    r->add_option("--seam", replay.seam, "Seam polyline file");
    r->add_flag("--flip-winding", replay.flip_winding, "Reverse mesh winding");
    r->add_option("--log", replay.log, "Binary frame log output");
    r->add_option("--jsonl", replay.jsonl, "Structured (JSON lines) frame export");
    r->add_option("--summary", replay.summary, "Summary and metrics (JSON)");
    r->add_option("--beads", replay.beads, "Putty bead report (JSON)");
    r->add_option("--tube-obj", replay.tube_obj, "Putty tube mesh (OBJ)");
    r->callback([&] { action = [&] { return cmd_replay(g, replay); }; });

    ServeArgs serve;
    auto* sv = app.add_subcommand("serve", "Run the real-time loop with UDP and websocket endpoints");
    sv->add_option("--duration", serve.duration, "Stop after this many seconds (default: until SIGINT)");
    sv->add_option("--udp-port", serve.udp_port, "Override the datagram port");
    sv->add_option("--ws-port", serve.ws_port, "Override the websocket/HTTP port");
    sv->add_option("--bind", serve.bind, "Bind address");
    sv->add_option("--static-dir", serve.static_dir, "Serve files from this directory over HTTP");
    sv->callback([&] { action = [&] { return cmd_serve(g, serve); }; });

    ShadowArgs shadow;
    auto* sh = app.add_subcommand("shadow", "Project a mesh onto a plane along a light direction");
    sh->add_option("--mesh", shadow.mesh, "Input mesh (.obj/.stl)")->required();
    sh->add_option("--out", shadow.out, "Output mesh (.obj/.stl)")->required();
    sh->add_option("--light", shadow.light, "Light direction x,y,z");
    sh->add_option("--plane", shadow.plane, "Plane nx,ny,nz,offset (n·x = offset)");
    sh->add_flag("--flip-winding", shadow.flip_winding, "Reverse mesh winding");
    sh->callback([&] { action = [&] { return cmd_shadow(g, shadow); }; });

    std::string assets_dir = "data";
    auto* as = app.add_subcommand("assets", "Regenerate the bundled rig, scene, seam and scripts");
    as->add_option("--out-dir", assets_dir, "Output directory");
    as->callback([&] { action = [&] { return cmd_assets(g, assets_dir); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    try {
        return action();
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const shw::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    }
}
