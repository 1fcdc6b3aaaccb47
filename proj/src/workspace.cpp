#include "shw/workspace.hpp"

#include "shw/errors.hpp"
#include "shw/tension.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace shw {

Vec3 GridSpec::cell_center(std::size_t index) const {
    const std::size_t nx = resolution[0], ny = resolution[1];
    const std::array<std::size_t, 3> idx{index % nx, (index / nx) % ny, index / (nx * ny)};
    Vec3 c;
    for (int a = 0; a < 3; ++a)
        c[a] = lower[a] + (static_cast<double>(idx[a]) + 0.5) * (upper[a] - lower[a]) / resolution[a];
    return c;
}

double WorkspaceReport::feasible_fraction() const {
    if (cells.empty()) return 0.0;
    const auto n = std::count_if(cells.begin(), cells.end(), [](const WorkspaceCell& c) { return c.wrench_closed; });
    return static_cast<double>(n) / static_cast<double>(cells.size());
}

WorkspaceCell evaluate_cell(const RigConfig& rig, const GripPose& pose) {
    WorkspaceCell cell;
    cell.center = pose.position();
    StructureMatrix a;
    try {
        a = build_structure_matrix(rig, pose);
    } catch (const DegenerateString&) {
        cell.condition_number = std::numeric_limits<double>::infinity();
        return cell;
    }
    cell.condition_number = condition_number(a);
    cell.wrench_closed = pretension(a, rig.tension).feasible();
    if (cell.wrench_closed) {
        cell.force_capability = axis_capability(a, rig.tension, false);
        cell.torque_capability = axis_capability(a, rig.tension, true);
    }
    return cell;
}

WorkspaceReport analyze_workspace(const RigConfig& rig, const GridSpec& grid, const Quat& orientation,
                                  unsigned threads) {
    for (int r : grid.resolution)
        if (r < 1) throw InvalidInput("analyze_workspace: resolution must be >= 1 per axis");
    rig.validate();

    WorkspaceReport report;
    report.grid = grid;
    report.orientation = orientation.normalized();
    report.cells.resize(grid.cell_count());

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, report.cells.size()));

    auto work = [&](std::size_t i) {
        report.cells[i] = evaluate_cell(rig, GripPose(grid.cell_center(i), report.orientation));
    };
    if (threads <= 1) {
        for (std::size_t i = 0; i < report.cells.size(); ++i) work(i);
        return report;
    }
    // each cell is written by exactly one worker into its own slot
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < report.cells.size(); i = next++) work(i);
        });
    pool.clear();
    return report;
}

std::vector<SweepRow> diameter_sweep(const RigConfig& rig_template, const std::vector<double>& diameters) {
    for (std::size_t i = 0; i < diameters.size(); ++i) {
        if (!(diameters[i] >= 0.0)) throw InvalidInput("diameter_sweep: diameters must be >= 0");
        if (i > 0 && diameters[i] < diameters[i - 1])
            throw InvalidInput("diameter_sweep: diameters must be sorted ascending");
    }
    std::vector<SweepRow> rows;
    rows.reserve(diameters.size());
    for (double d : diameters) {
        const RigConfig rig = rig_template.with_diameter(d);
        const StructureMatrix a = build_structure_matrix(rig, GripPose::at(rig.center()));
        SweepRow row;
        row.diameter = d;
        row.condition_number = condition_number(a);
        row.torque_capability = axis_capability(a, rig.tension, true);
        rows.push_back(row);
    }
    return rows;
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ParseError("<number>", 0, "bad number '" + s + "'");
    return v;
}

std::string workspace_to_csv(const WorkspaceReport& report) {
    std::ostringstream out;
    out << "index,x_m,y_m,z_m,wrench_closed,condition_number,force_capability_N,torque_capability_Nm\n";
    for (std::size_t i = 0; i < report.cells.size(); ++i) {
        const auto& c = report.cells[i];
        out << i << ',' << format_double(c.center.x()) << ',' << format_double(c.center.y()) << ','
            << format_double(c.center.z()) << ',' << (c.wrench_closed ? 1 : 0) << ','
            << format_double(c.condition_number) << ',' << format_double(c.force_capability) << ','
            << format_double(c.torque_capability) << '\n';
    }
    return out.str();
}

namespace {

nlohmann::json vec_json(const Vec3& v) { return {format_double(v.x()), format_double(v.y()), format_double(v.z())}; }

Vec3 json_vec(const nlohmann::json& j) {
    return {parse_double(j.at(0).get<std::string>()), parse_double(j.at(1).get<std::string>()),
            parse_double(j.at(2).get<std::string>())};
}

}  // namespace

std::string workspace_summary_json(const WorkspaceReport& report) {
    nlohmann::json j;
    // numbers are stored as shortest round-trip strings so infinities survive
    j["grid"]["lower"] = vec_json(report.grid.lower);
    j["grid"]["upper"] = vec_json(report.grid.upper);
    j["grid"]["resolution"] = report.grid.resolution;
    const Quat& q = report.orientation;
    j["orientation_wxyz"] = {format_double(q.w()), format_double(q.x()), format_double(q.y()), format_double(q.z())};
    j["cell_count"] = report.cells.size();
    j["feasible_fraction"] = report.feasible_fraction();
    double min_force = std::numeric_limits<double>::infinity(), min_torque = min_force;
    double worst_cond = 0.0;
    for (const auto& c : report.cells) {
        min_force = std::min(min_force, c.force_capability);
        min_torque = std::min(min_torque, c.torque_capability);
        worst_cond = std::max(worst_cond, c.condition_number);
    }
    j["min_force_capability_N"] = format_double(report.cells.empty() ? 0.0 : min_force);
    j["min_torque_capability_Nm"] = format_double(report.cells.empty() ? 0.0 : min_torque);
    j["max_condition_number"] = format_double(worst_cond);
    return j.dump(2);
}

WorkspaceReport workspace_from_files(const std::string& csv, const std::string& summary_json) {
    WorkspaceReport report;
    try {
        const auto j = nlohmann::json::parse(summary_json);
        report.grid.lower = json_vec(j.at("grid").at("lower"));
        report.grid.upper = json_vec(j.at("grid").at("upper"));
        report.grid.resolution = j.at("grid").at("resolution").get<std::array<int, 3>>();
        const auto& q = j.at("orientation_wxyz");
        report.orientation = Quat(parse_double(q.at(0).get<std::string>()), parse_double(q.at(1).get<std::string>()),
                                  parse_double(q.at(2).get<std::string>()), parse_double(q.at(3).get<std::string>()));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("<workspace summary>", 0, e.what());
    }
    std::istringstream in(csv);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 || line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) f.push_back(field);
        if (f.size() != 8) throw ParseError("<workspace csv>", lineno, "expected 8 fields");
        WorkspaceCell c;
        c.center = Vec3(parse_double(f[1]), parse_double(f[2]), parse_double(f[3]));
        c.wrench_closed = f[4] == "1";
        c.condition_number = parse_double(f[5]);
        c.force_capability = parse_double(f[6]);
        c.torque_capability = parse_double(f[7]);
        report.cells.push_back(c);
    }
    return report;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "diameter_m,condition_number,torque_capability_Nm\n";
    for (const auto& r : rows)
        out << format_double(r.diameter) << ',' << format_double(r.condition_number) << ','
            << format_double(r.torque_capability) << '\n';
    return out.str();
}

std::string sweep_to_json(const std::vector<SweepRow>& rows) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row;
        row["diameter_m"] = r.diameter;
        // JSON has no infinity; rank-deficient rows carry null
        row["condition_number"] = std::isfinite(r.condition_number) ? nlohmann::json(r.condition_number) : nlohmann::json();
        row["torque_capability_Nm"] = r.torque_capability;
        j.push_back(row);
    }
    return j.dump(2);
}

}  // namespace shw
