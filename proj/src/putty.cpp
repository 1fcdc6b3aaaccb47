#include "shw/putty.hpp"

#include "shw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace shw {

namespace {

Vec3 any_perpendicular(const Vec3& t) {
    int axis = 0;
    t.cwiseAbs().minCoeff(&axis);
    const Vec3 e = Vec3::Unit(axis);
    return (e - e.dot(t) * t).normalized();
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 d = b - a;
    const double len2 = d.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
    return (a + t * d - p).norm();
}

}  // namespace

double PuttyBead::arc_length() const {
    double s = 0.0;
    for (std::size_t i = 1; i < samples.size(); ++i) s += (samples[i].position - samples[i - 1].position).norm();
    return s;
}

std::size_t PuttyTrail::sample_count() const {
    std::size_t n = 0;
    for (const auto& b : beads_) n += b.samples.size();
    return n;
}

void PuttyTrail::append(PuttyBead& bead, const PuttySample& s) {
    bead.samples.push_back(s);
    const std::size_t n = bead.samples.size();
    const int segs = bead.ring_segments;
    bead.tube_vertices.resize(n * segs);
    bead.ring_normals.resize(n);

    auto tangent = [&](std::size_t i) -> Vec3 {
        if (n == 1) return Vec3::UnitZ();
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 < n ? i + 1 : n - 1;
        const Vec3 d = bead.samples[hi].position - bead.samples[lo].position;
        return d.norm() > 0.0 ? Vec3(d.normalized()) : Vec3::UnitZ();
    };
    auto build_ring = [&](std::size_t i) {
        const Vec3 t = tangent(i);
        Vec3 normal;
        if (i == 0) {
            normal = any_perpendicular(t);
        } else {
            // parallel transport of the previous ring's frame
            const Vec3& prev = bead.ring_normals[i - 1];
            normal = prev - prev.dot(t) * t;
            normal = normal.norm() > 1e-9 ? Vec3(normal.normalized()) : any_perpendicular(t);
        }
        bead.ring_normals[i] = normal;
        const Vec3 binormal = t.cross(normal);
        for (int k = 0; k < segs; ++k) {
            const double a = 2.0 * std::numbers::pi * k / segs;
            bead.tube_vertices[i * segs + k] =
                bead.samples[i].position + bead.radius * (std::cos(a) * normal + std::sin(a) * binormal);
        }
    };
    // the previous end ring changes tangent once it has a successor
    if (n >= 2) build_ring(n - 2);
    build_ring(n - 1);

    if (n >= 2) {
        const auto base0 = static_cast<std::uint32_t>((n - 2) * segs);
        const auto base1 = static_cast<std::uint32_t>((n - 1) * segs);
        for (int k = 0; k < segs; ++k) {
            const auto k1 = static_cast<std::uint32_t>((k + 1) % segs);
            const auto kk = static_cast<std::uint32_t>(k);
            bead.tube_triangles.push_back({base0 + kk, base0 + k1, base1 + k1});
            bead.tube_triangles.push_back({base0 + kk, base1 + k1, base1 + kk});
        }
    }
}

std::vector<PuttySample> PuttyTrail::extrude(const Vec3& tip, double time, bool trigger) {
    std::vector<PuttySample> delta;
    const PuttySample sample{tip, time};
    if (trigger) {
        if (!open_) {
            PuttyBead bead;
            bead.radius = params_.radius;
            bead.ring_segments = params_.ring_segments;
            beads_.push_back(std::move(bead));
            open_ = true;
            append(beads_.back(), sample);
            delta.push_back(sample);
            pending_.reset();
            return delta;
        }
        PuttyBead& bead = beads_.back();
        // relative slack so exactly-spaced inputs are not rejected by round-off
        if ((tip - bead.samples.back().position).norm() >= params_.min_spacing * (1.0 - 1e-9)) {
            append(bead, sample);
            delta.push_back(sample);
            pending_.reset();
        } else {
            pending_ = sample;
        }
        return delta;
    }
    if (open_) {
        // close the bead where the trigger was last held
        PuttyBead& bead = beads_.back();
        if (pending_ && (pending_->position - bead.samples.back().position).norm() > 1e-12) {
            append(bead, *pending_);
            delta.push_back(*pending_);
        }
        open_ = false;
        pending_.reset();
    }
    return delta;
}

PuttyBead extrude_path(std::span<const Vec3> path, const PuttyParams& params, double dt) {
    PuttyTrail trail(params);
    for (std::size_t i = 0; i < path.size(); ++i) trail.extrude(path[i], static_cast<double>(i) * dt, true);
    if (!path.empty()) trail.extrude(path.back(), static_cast<double>(path.size()) * dt, false);
    if (trail.beads().empty()) {
        PuttyBead empty;
        empty.radius = params.radius;
        empty.ring_segments = params.ring_segments;
        return empty;
    }
    return trail.beads().front();
}

double SeamPath::length() const {
    double s = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) s += (points[i] - points[i - 1]).norm();
    return s;
}

void SeamPath::validate() const {
    if (points.size() < 2) throw InvalidInput("seam: needs at least 2 points");
    for (std::size_t i = 1; i < points.size(); ++i)
        if ((points[i] - points[i - 1]).norm() == 0.0)
            throw InvalidInput("seam: consecutive points " + std::to_string(i - 1) + " and " + std::to_string(i) +
                               " coincide");
    if (!(slip_tolerance > 0.0)) throw InvalidInput("seam: slip tolerance must be positive");
}

double SeamPath::distance(const Vec3& p) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < points.size(); ++i) best = std::min(best, point_segment_distance(p, points[i - 1], points[i]));
    if (points.size() == 1) best = (p - points[0]).norm();
    return best;
}

Vec3 SeamPath::point_at(double s) const {
    if (s <= 0.0) return points.front();
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double len = (points[i] - points[i - 1]).norm();
        if (s <= len) return points[i - 1] + (s / len) * (points[i] - points[i - 1]);
        s -= len;
    }
    return points.back();
}

std::vector<Vec3> SeamPath::resample(double spacing) const {
    std::vector<Vec3> out;
    if (points.empty()) return out;
    out.push_back(points.front());
    for (std::size_t i = 1; i < points.size(); ++i) {
        const Vec3 d = points[i] - points[i - 1];
        const int n = std::max(1, static_cast<int>(std::ceil(d.norm() / spacing)));
        for (int k = 1; k <= n; ++k) out.push_back(points[i - 1] + (static_cast<double>(k) / n) * d);
    }
    return out;
}

SeamPath parse_seam(const std::string& text, const std::string& source, double slip_tolerance) {
    SeamPath seam;
    seam.slip_tolerance = slip_tolerance;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        std::istringstream all(line);
        double x, y, z;
        std::string extra;
        if (!(all >> x >> y >> z) || (all >> extra))
            throw ParseError(source, lineno, "expected three decimal fields (x y z in meters)");
        seam.points.emplace_back(x, y, z);
    }
    try {
        seam.validate();
    } catch (const InvalidInput& e) {
        throw ParseError(source, 0, e.what());
    }
    return seam;
}

SeamPath load_seam(const std::filesystem::path& path, double slip_tolerance) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open seam file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_seam(ss.str(), path.string(), slip_tolerance);
}

void save_seam(const SeamPath& seam, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "# seam polyline, one point per line: x y z (m)\n";
    out.precision(17);
    for (const auto& p : seam.points) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
}

SeamMetrics seam_metrics(const PuttyBead& bead, const SeamPath& seam) {
    return seam_metrics(std::span<const PuttyBead>(&bead, 1), seam);
}

SeamMetrics seam_metrics(std::span<const PuttyBead> beads, const SeamPath& seam) {
    seam.validate();
    SeamMetrics m;
    const double tol = seam.slip_tolerance;
    const double tol2 = tol * tol;

    std::vector<Vec3> pts;
    for (const auto& b : beads)
        for (const auto& s : b.samples) pts.push_back(s.position);
    if (pts.empty()) return m;

    // coverage: seam arc length, in pieces of tol/20, whose nearest sample is within tol
    const double piece = tol / 20.0;
    double covered = 0.0, total = 0.0;
    for (std::size_t i = 1; i < seam.points.size(); ++i) {
        const Vec3 a = seam.points[i - 1], d = seam.points[i] - a;
        const double len = d.norm();
        const int n = std::max(1, static_cast<int>(std::ceil(len / piece)));
        const double w = len / n;
        for (int k = 0; k < n; ++k) {
            const Vec3 q = a + ((k + 0.5) / n) * d;
            total += w;
            for (const auto& p : pts)
                if ((p - q).squaredNorm() <= tol2) {
                    covered += w;
                    break;
                }
        }
    }
    m.coverage = total > 0.0 ? std::clamp(covered / total, 0.0, 1.0) : 0.0;

    for (const auto& b : beads) {
        bool in_slip = false;
        for (const auto& s : b.samples) {
            const double dev = seam.distance(s.position);
            m.max_deviation = std::max(m.max_deviation, dev);
            if (dev > tol) {
                if (!in_slip) ++m.slip_events;
                in_slip = true;
            } else {
                in_slip = false;
            }
        }
    }
    return m;
}

SeamPath car_panel_seam(double spacing) {
    SeamPath seam;
    constexpr double x0 = -0.25, x1 = 0.25;
    // arc length per unit x is at least 1, so dx = spacing keeps chords ≥ spacing apart in x
    const int n = std::max(2, static_cast<int>(std::ceil((x1 - x0) / spacing)));
    for (int i = 0; i <= n; ++i) {
        const double x = x0 + (x1 - x0) * i / n;
        const double y = car_panel_seam_y(x);
        seam.points.emplace_back(x, y, car_panel_height(x, y));
    }
    return seam;
}

}  // namespace shw
