#include "shw/config.hpp"
#include "shw/errors.hpp"
#include "shw/kinematics.hpp"
#include "shw/protocol.hpp"
#include "shw/scenario.hpp"
#include "shw/tension.hpp"
#include "shw/workspace.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace shw;

namespace {

using Quat4 = std::array<double, 4>;

GripPose make_pose(const Vec3& position, const Quat4& q) {
    return GripPose(position, Quat(q[0], q[1], q[2], q[3]));
}

Quat4 quat_wxyz(const Quat& q) { return {q.w(), q.x(), q.y(), q.z()}; }

py::dict summary_dict(const ScenarioSummary& s, const std::vector<double>& step_times) {
    py::dict d;
    d["ticks"] = s.ticks;
    d["max_force"] = s.max_force;
    d["max_torque"] = s.max_torque;
    d["infeasible_ticks"] = s.infeasible_ticks;
    d["numerical_failure_ticks"] = s.numerical_failure_ticks;
    d["contact_ticks"] = s.contact_ticks;
    d["beads"] = s.beads;
    d["bead_samples"] = s.samples;
    if (s.seam) {
        d["coverage"] = s.seam->coverage;
        d["max_deviation"] = s.seam->max_deviation;
        d["slip_events"] = s.seam->slip_events;
    }
    d["digest"] = s.digest;
    d["step_times"] = step_times;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Stringed haptic workbench core";

    // translators run newest first, so the base class goes first
    const auto& base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidInput>(m, "InvalidInput", base);
    py::register_exception<ParseError>(m, "ParseError", base);
    py::register_exception<NoConvergence>(m, "NoConvergence", base);
    py::register_exception<RankDeficient>(m, "RankDeficient", base);

    py::class_<TensionBounds>(m, "TensionBounds")
        .def(py::init<>())
        .def_readwrite("min", &TensionBounds::min)
        .def_readwrite("max", &TensionBounds::max)
        .def_property_readonly("mid", &TensionBounds::mid);

    py::class_<RigConfig>(m, "RigConfig")
        .def_readwrite("motor_positions", &RigConfig::motor_positions)
        .def_readwrite("circle_diameter", &RigConfig::circle_diameter)
        .def_readwrite("tension", &RigConfig::tension)
        .def_property_readonly("string_pairing",
                               [](const RigConfig& r) {
                                   std::vector<std::pair<std::size_t, std::size_t>> out;
                                   for (const auto& s : r.string_pairing) out.emplace_back(s.motor, s.attachment);
                                   return out;
                               })
        .def("with_diameter", &RigConfig::with_diameter, py::arg("diameter"))
        .def("validate", &RigConfig::validate)
        .def("warnings", &RigConfig::warnings)
        .def("center", &RigConfig::center)
        .def("to_json", [](const RigConfig& r) { return rig_to_json(r); });

    m.def("default_rig", &default_rig);
    m.def("load_rig", &load_rig, py::arg("path"));
    m.def("parse_rig_json", [](const std::string& text) { return parse_rig_json(text); }, py::arg("text"));

    m.def(
        "structure_matrix",
        [](const RigConfig& rig, const Vec3& position, const Quat4& q) {
            return Eigen::Matrix<double, 6, 8>(build_structure_matrix(rig, make_pose(position, q)));
        },
        py::arg("rig"), py::arg("position"), py::arg("quaternion") = Quat4{1, 0, 0, 0});
    m.def(
        "string_lengths",
        [](const RigConfig& rig, const Vec3& position, const Quat4& q) {
            return Eigen::Matrix<double, 8, 1>(string_lengths(rig, make_pose(position, q)));
        },
        py::arg("rig"), py::arg("position"), py::arg("quaternion") = Quat4{1, 0, 0, 0});
    m.def(
        "solve_tensions",
        [](const Eigen::Matrix<double, 6, 8>& a, const Eigen::Matrix<double, 6, 1>& w, const TensionBounds& b) {
            const TensionSolveReport r = solve_tensions(a, w, b);
            py::dict d;
            d["status"] = std::string(to_string(r.status));
            d["tensions"] = Eigen::Matrix<double, 8, 1>(r.tensions);
            d["residual"] = r.residual_norm;
            d["objective"] = r.objective;
            d["iterations"] = r.iterations;
            d["condition"] = r.condition_estimate;
            return d;
        },
        py::arg("a"), py::arg("wrench"), py::arg("bounds") = TensionBounds{});
    m.def(
        "wrench_capability",
        [](const Eigen::Matrix<double, 6, 8>& a, const Eigen::Matrix<double, 6, 1>& d, const TensionBounds& b) {
            return wrench_capability(a, b, d);
        },
        py::arg("a"), py::arg("direction"), py::arg("bounds") = TensionBounds{});
    m.def(
        "condition_number", [](const Eigen::Matrix<double, 6, 8>& a) { return condition_number(a); }, py::arg("a"));

    m.def(
        "estimate_pose",
        [](const RigConfig& rig, const Eigen::Matrix<double, 8, 1>& lengths, const Vec3& guess_position,
           const Quat4& guess_q) {
            const PoseEstimate e = estimate_pose(rig, lengths, make_pose(guess_position, guess_q));
            return py::make_tuple(Vec3(e.pose.position()), quat_wxyz(e.pose.orientation()), e.residual_rms,
                                  e.iterations);
        },
        py::arg("rig"), py::arg("lengths"), py::arg("guess_position") = Vec3::Zero().eval(),
        py::arg("guess_quaternion") = Quat4{1, 0, 0, 0});

    m.def(
        "diameter_sweep",
        [](const RigConfig& rig, const std::vector<double>& d) {
            std::vector<std::tuple<double, double, double>> out;
            for (const auto& r : diameter_sweep(rig, d)) out.emplace_back(r.diameter, r.condition_number, r.torque_capability);
            return out;
        },
        py::arg("rig"), py::arg("diameters"));
    m.def(
        "workspace",
        [](const RigConfig& rig, const Vec3& lower, const Vec3& upper, const std::array<int, 3>& res, unsigned threads) {
            const WorkspaceReport r = analyze_workspace(rig, GridSpec{lower, upper, res}, Quat::Identity(), threads);
            py::list cells;
            for (const auto& c : r.cells) {
                py::dict d;
                d["center"] = Vec3(c.center);
                d["wrench_closed"] = c.wrench_closed;
                d["condition"] = c.condition_number;
                d["force_capability"] = c.force_capability;
                d["torque_capability"] = c.torque_capability;
                cells.append(d);
            }
            return py::make_tuple(r.feasible_fraction(), cells);
        },
        py::arg("rig"), py::arg("lower"), py::arg("upper"), py::arg("resolution"), py::arg("threads") = 1u);

    m.def(
        "replay",
        [](const std::filesystem::path& script, const std::filesystem::path& config) {
            const AppConfig c = load_config(config);
            ScenarioResult r;
            {
                py::gil_scoped_release release;
                r = run_scenario(load_script(script), load_configured_rig(c), load_configured_scene(c), c.params);
            }
            return summary_dict(r.summary, r.step_times);
        },
        py::arg("script"), py::arg("config"));

    m.def(
        "encode_command",
        [](std::uint32_t seq, const Vec3& position, const Quat4& q, bool trigger) {
            const auto bytes = wire::encode(wire::CommandPacket::from_pose(seq, make_pose(position, q), trigger));
            return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
        },
        py::arg("seq"), py::arg("position"), py::arg("quaternion") = Quat4{1, 0, 0, 0}, py::arg("trigger") = false);
    m.def(
        "decode_command",
        [](const py::bytes& data) -> py::object {
            const std::string s = data;
            const auto p = wire::decode_command(
                std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
            if (!p) return py::none();
            return py::make_tuple(p->sequence, p->position, p->quaternion, p->trigger != 0);
        },
        py::arg("data"));
}
