#include "shw/rig.hpp"

#include "shw/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace shw {

namespace {

constexpr double kMinStringLength = 1e-6;

// Attachment j sits at azimuth 90°·j. Its motors sit on the box corners at
// azimuth 45° − 90°·j (top, motor j) and −45° − 90°·j (bottom, motor j+4).
std::array<Vec3, kStringCount> box_motors(const Vec3& extents) {
    const Vec3 h = 0.5 * extents;
    // corner q at azimuth 45° + 90°·q
    const double sx[4] = {+1, -1, -1, +1};
    const double sy[4] = {+1, +1, -1, -1};
    std::array<Vec3, kStringCount> m;
    for (std::size_t j = 0; j < 4; ++j) {
        const std::size_t top = (4 - j) % 4;
        const std::size_t bottom = (7 - j) % 4;
        m[j] = Vec3(sx[top] * h.x(), sy[top] * h.y(), h.z());
        m[j + 4] = Vec3(sx[bottom] * h.x(), sy[bottom] * h.y(), -h.z());
    }
    return m;
}

std::array<StringRoute, kStringCount> default_pairing() {
    std::array<StringRoute, kStringCount> p;
    for (std::size_t i = 0; i < kStringCount; ++i) p[i] = {i, i % 4};
    return p;
}

}  // namespace

std::array<Vec3, kAttachmentCount> RigConfig::attachment_offsets() const {
    const double r = 0.5 * circle_diameter;
    // exact values at the quadrant angles avoid cos(π/2) round-off
    return {Vec3(r, 0, 0), Vec3(0, r, 0), Vec3(-r, 0, 0), Vec3(0, -r, 0)};
}

void RigConfig::validate() const {
    for (const auto& m : motor_positions)
        if (!m.allFinite()) throw InvalidInput("rig: motor position is not finite");
    for (std::size_t i = 0; i < kStringCount; ++i)
        for (std::size_t j = i + 1; j < kStringCount; ++j)
            if ((motor_positions[i] - motor_positions[j]).norm() < kMinStringLength)
                throw InvalidInput("rig: motors " + std::to_string(i) + " and " + std::to_string(j) +
                                   " coincide");
    const auto [lo, hi] = bounds();
    if ((hi - lo).prod() <= 0.0) throw InvalidInput("rig: motor hexahedron has zero volume");
    if (!(circle_diameter >= 0.0) || !std::isfinite(circle_diameter))
        throw InvalidInput("rig: circle_diameter must be >= 0");
    if (!(tension.min > 0.0) || !(tension.min < tension.max) || !std::isfinite(tension.max))
        throw InvalidInput("rig: tension bounds must satisfy 0 < min < max");

    std::array<int, kStringCount> motor_use{};
    std::array<int, kAttachmentCount> attach_use{};
    for (const auto& route : string_pairing) {
        if (route.motor >= kStringCount || route.attachment >= kAttachmentCount)
            throw InvalidInput("rig: string pairing index out of range");
        ++motor_use[route.motor];
        ++attach_use[route.attachment];
    }
    for (int c : motor_use)
        if (c != 1) throw InvalidInput("rig: each motor must carry exactly one string");
    for (int c : attach_use)
        if (c != 2) throw InvalidInput("rig: each attachment point must carry exactly two strings");
}

std::vector<std::string> RigConfig::warnings() const {
    std::vector<std::string> out;
    if (circle_diameter < 0.10 || circle_diameter > 0.30) {
        std::ostringstream s;
        s << "circle_diameter " << circle_diameter
          << " m is outside the recommended 0.10-0.30 m range (accuracy and singularities)";
        out.push_back(s.str());
    }
    if (prop_size > 0.0 && circle_diameter > 2.0 * prop_size) {
        std::ostringstream s;
        s << "circle_diameter " << circle_diameter << " m exceeds twice the prop size (" << prop_size
          << " m)";
        out.push_back(s.str());
    }
    return out;
}

Vec3 RigConfig::center() const {
    const auto [lo, hi] = bounds();
    return 0.5 * (lo + hi);
}

std::pair<Vec3, Vec3> RigConfig::bounds() const {
    Vec3 lo = motor_positions[0], hi = motor_positions[0];
    for (const auto& m : motor_positions) {
        lo = lo.cwiseMin(m);
        hi = hi.cwiseMax(m);
    }
    return {lo, hi};
}

RigConfig box_rig(const Vec3& extents, double circle_diameter) {
    RigConfig rig;
    rig.motor_positions = box_motors(extents);
    rig.circle_diameter = circle_diameter;
    rig.string_pairing = default_pairing();
    return rig;
}

RigConfig default_rig() { return box_rig(Vec3(1.4, 0.8, 1.0), 0.20); }

RigConfig parse_rig_json(const std::string& text, const std::string& source) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(source, 0, e.what());
    }
    RigConfig rig = default_rig();
    try {
        if (j.contains("box")) {
            const auto b = j.at("box").get<std::array<double, 3>>();
            rig.motor_positions = box_motors(Vec3(b[0], b[1], b[2]));
        }
        if (j.contains("motor_positions")) {
            const auto& mp = j.at("motor_positions");
            if (!mp.is_array() || mp.size() != kStringCount)
                throw ParseError(source, 0, "motor_positions must hold 8 points");
            for (std::size_t i = 0; i < kStringCount; ++i) {
                const auto p = mp[i].get<std::array<double, 3>>();
                rig.motor_positions[i] = Vec3(p[0], p[1], p[2]);
            }
        }
        rig.circle_diameter = j.value("circle_diameter", rig.circle_diameter);
        if (j.contains("string_pairing")) {
            const auto& sp = j.at("string_pairing");
            if (!sp.is_array() || sp.size() != kStringCount)
                throw ParseError(source, 0, "string_pairing must hold 8 [motor, attachment] pairs");
            for (std::size_t i = 0; i < kStringCount; ++i) {
                const auto p = sp[i].get<std::array<std::size_t, 2>>();
                rig.string_pairing[i] = {p[0], p[1]};
            }
        }
        rig.tension.min = j.value("tension_min", rig.tension.min);
        rig.tension.max = j.value("tension_max", rig.tension.max);
        rig.prop_size = j.value("prop_size", rig.prop_size);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(source, 0, e.what());
    }
    try {
        rig.validate();
    } catch (const InvalidInput& e) {
        throw ParseError(source, 0, e.what());
    }
    return rig;
}

RigConfig load_rig(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open rig file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_rig_json(ss.str(), path.string());
}

std::string rig_to_json(const RigConfig& rig) {
    nlohmann::json j;
    j["motor_positions"] = nlohmann::json::array();
    for (const auto& m : rig.motor_positions) j["motor_positions"].push_back({m.x(), m.y(), m.z()});
    j["circle_diameter"] = rig.circle_diameter;
    j["string_pairing"] = nlohmann::json::array();
    for (const auto& r : rig.string_pairing) j["string_pairing"].push_back({r.motor, r.attachment});
    j["tension_min"] = rig.tension.min;
    j["tension_max"] = rig.tension.max;
    if (rig.prop_size > 0.0) j["prop_size"] = rig.prop_size;
    return j.dump(2);
}

void save_rig(const RigConfig& rig, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write rig file " + path.string());
    out << rig_to_json(rig) << '\n';
}

std::array<Vec3, kStringCount> attachment_points(const RigConfig& rig, const GripPose& pose) {
    const auto offsets = rig.attachment_offsets();
    std::array<Vec3, kStringCount> pts;
    for (std::size_t i = 0; i < kStringCount; ++i)
        pts[i] = pose.transform(offsets[rig.string_pairing[i].attachment]);
    return pts;
}

StringLengths string_lengths(const RigConfig& rig, const GripPose& pose) {
    const auto pts = attachment_points(rig, pose);
    StringLengths l;
    for (std::size_t i = 0; i < kStringCount; ++i) {
        const double d = (rig.motor_positions[rig.string_pairing[i].motor] - pts[i]).norm();
        if (!(d > kMinStringLength)) throw DegenerateString(i, d);
        l[i] = d;
    }
    return l;
}

StructureMatrix build_structure_matrix(const RigConfig& rig, const GripPose& pose) {
    const auto offsets = rig.attachment_offsets();
    const Mat3 rot = pose.rotation();
    StructureMatrix a;
    for (std::size_t i = 0; i < kStringCount; ++i) {
        const Vec3 lever = rot * offsets[rig.string_pairing[i].attachment];
        const Vec3 d = rig.motor_positions[rig.string_pairing[i].motor] - (pose.position() + lever);
        const double len = d.norm();
        if (!(len > kMinStringLength)) throw DegenerateString(i, len);
        const Vec3 u = d / len;
        a.col(i).head<3>() = u;
        a.col(i).tail<3>() = lever.cross(u);
    }
    return a;
}

Eigen::Matrix<double, 6, 1> singular_values(const StructureMatrix& a) {
    Eigen::JacobiSVD<Eigen::Matrix<double, 6, 8>> svd(a);
    return svd.singularValues();
}

double condition_number(const StructureMatrix& a) {
    const auto s = singular_values(a);
    if (s[0] == 0.0 || s[5] <= 1e-10 * s[0]) return std::numeric_limits<double>::infinity();
    return s[0] / s[5];
}

int numerical_rank(const StructureMatrix& a, double tol) {
    const auto s = singular_values(a);
    int r = 0;
    for (int i = 0; i < 6; ++i)
        if (s[i] > tol * std::max(1.0, s[0])) ++r;
    return r;
}

}  // namespace shw
