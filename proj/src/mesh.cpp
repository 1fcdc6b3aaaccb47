#include "shw/mesh.hpp"

#include "shw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace shw {

namespace {

// Closest points between segments p1→q1 and p2→q2 (s, t are the parameters).
double closest_segment_segment(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2, double& s, double& t,
                               Vec3& c1, Vec3& c2) {
    const Vec3 d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
    const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
    constexpr double eps = 1e-30;
    if (a <= eps && e <= eps) {
        s = t = 0.0;
    } else if (a <= eps) {
        s = 0.0;
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = d1.dot(r);
        if (e <= eps) {
            t = 0.0;
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = d1.dot(d2);
            const double denom = a * e - b * b;
            s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    c1 = p1 + d1 * s;
    c2 = p2 + d2 * t;
    return (c1 - c2).squaredNorm();
}

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

bool Aabb::intersects_segment(const Vec3& a, const Vec3& b) const {
    const Vec3 d = b - a;
    double t0 = 0.0, t1 = 1.0;
    for (int k = 0; k < 3; ++k) {
        if (std::abs(d[k]) < 1e-300) {
            if (a[k] < lo[k] || a[k] > hi[k]) return false;
            continue;
        }
        const double inv = 1.0 / d[k];
        double ta = (lo[k] - a[k]) * inv, tb = (hi[k] - a[k]) * inv;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
    }
    return true;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c, TriFeature* feature) {
    auto set = [&](TriFeature f) {
        if (feature) *feature = f;
    };
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) {
        set(TriFeature::Vertex0);
        return a;
    }
    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) {
        set(TriFeature::Vertex1);
        return b;
    }
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        set(TriFeature::Edge01);
        return a + ab * (d1 / (d1 - d3));
    }
    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) {
        set(TriFeature::Vertex2);
        return c;
    }
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        set(TriFeature::Edge20);
        return a + ac * (d2 / (d2 - d6));
    }
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        set(TriFeature::Edge12);
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    const double denom = 1.0 / (va + vb + vc);
    set(TriFeature::Face);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

std::optional<double> segment_triangle_intersection(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b,
                                                    const Vec3& c) {
    constexpr double kBaryEps = 1e-12;
    const Vec3 d = q - p, e1 = b - a, e2 = c - a;
    const Vec3 h = d.cross(e2);
    const double det = e1.dot(h);
    if (std::abs(det) <= 1e-14 * d.norm() * e1.norm() * e2.norm()) return std::nullopt;
    const double inv = 1.0 / det;
    const Vec3 s = p - a;
    const double u = inv * s.dot(h);
    if (u < -kBaryEps || u > 1.0 + kBaryEps) return std::nullopt;
    const Vec3 qv = s.cross(e1);
    const double v = inv * d.dot(qv);
    if (v < -kBaryEps || u + v > 1.0 + kBaryEps) return std::nullopt;
    const double t = inv * e2.dot(qv);
    if (t < 0.0 || t > 1.0) return std::nullopt;
    return t;
}

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<TriIndices> triangles, const Options& options)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
    cleanup(options);
    build_normals();
    build_bvh();
}

void TriMesh::cleanup(const Options& options) {
    for (const auto& v : vertices_)
        if (!v.allFinite()) throw InvalidInput("mesh: non-finite vertex");
    std::vector<TriIndices> kept;
    kept.reserve(triangles_.size());
    std::size_t dropped = 0;
    for (auto t : triangles_) {
        for (auto i : t)
            if (i >= vertices_.size()) throw InvalidInput("mesh: triangle index out of range");
        const double area = 0.5 * (vertices_[t[1]] - vertices_[t[0]]).cross(vertices_[t[2]] - vertices_[t[0]]).norm();
        if (!(area > options.min_triangle_area)) {
            ++dropped;
            continue;
        }
        if (options.flip_winding) std::swap(t[1], t[2]);
        kept.push_back(t);
    }
    if (dropped)
        warnings_.push_back("dropped " + std::to_string(dropped) + " degenerate triangle(s) with area <= " +
                            std::to_string(options.min_triangle_area) + " m^2");
    triangles_ = std::move(kept);
    if (triangles_.empty()) throw EmptyMesh("mesh has no non-degenerate triangles");
}

void TriMesh::build_normals() {
    const std::size_t nt = triangles_.size();
    face_normals_.resize(nt);
    vertex_normals_.assign(vertices_.size(), Vec3::Zero());
    std::map<std::uint64_t, Vec3> edge_sum;
    for (std::size_t i = 0; i < nt; ++i) {
        const auto [a, b, c] = corners(i);
        const Vec3 n = (b - a).cross(c - a).normalized();
        face_normals_[i] = n;
        const std::array<Vec3, 3> p{a, b, c};
        for (int k = 0; k < 3; ++k) {
            const Vec3 e0 = (p[(k + 1) % 3] - p[k]).normalized();
            const Vec3 e1 = (p[(k + 2) % 3] - p[k]).normalized();
            const double angle = std::acos(std::clamp(e0.dot(e1), -1.0, 1.0));
            vertex_normals_[triangles_[i][k]] += angle * n;
            const auto key = edge_key(triangles_[i][k], triangles_[i][(k + 1) % 3]);
            auto [it, inserted] = edge_sum.try_emplace(key, Vec3::Zero());
            it->second += n;
        }
    }
    for (auto& n : vertex_normals_)
        if (n.squaredNorm() > 0.0) n.normalize();
    edge_normals_.resize(nt);
    for (std::size_t i = 0; i < nt; ++i)
        for (int k = 0; k < 3; ++k) {
            Vec3 n = edge_sum.at(edge_key(triangles_[i][k], triangles_[i][(k + 1) % 3]));
            edge_normals_[i][k] = n.squaredNorm() > 0.0 ? Vec3(n.normalized()) : face_normals_[i];
        }
}

void TriMesh::build_bvh() {
    const std::size_t nt = triangles_.size();
    tri_boxes_.resize(nt);
    order_.resize(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        for (const auto& p : corners(i)) tri_boxes_[i].extend(p);
        order_[i] = static_cast<std::uint32_t>(i);
    }
    nodes_.clear();
    nodes_.reserve(2 * nt / 4 + 2);
    build_node(0, static_cast<std::uint32_t>(nt));
}

std::uint32_t TriMesh::build_node(std::uint32_t begin, std::uint32_t end) {
    constexpr std::uint32_t kLeafSize = 4;
    const auto index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    Aabb box, centroids;
    for (std::uint32_t i = begin; i < end; ++i) {
        box.extend(tri_boxes_[order_[i]]);
        centroids.extend(0.5 * (tri_boxes_[order_[i]].lo + tri_boxes_[order_[i]].hi));
    }
    nodes_[index].box = box;
    if (end - begin <= kLeafSize) {
        nodes_[index].first = begin;
        nodes_[index].count = end - begin;
        return index;
    }
    int axis = 0;
    (centroids.hi - centroids.lo).maxCoeff(&axis);
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t x, std::uint32_t y) {
                         const double cx = tri_boxes_[x].lo[axis] + tri_boxes_[x].hi[axis];
                         const double cy = tri_boxes_[y].lo[axis] + tri_boxes_[y].hi[axis];
                         return cx < cy || (cx == cy && x < y);
                     });
    const std::uint32_t left = build_node(begin, mid);
    const std::uint32_t right = build_node(mid, end);
    nodes_[index].first = left;
    nodes_[index].right = right;
    nodes_[index].count = 0;
    return index;
}

Vec3 TriMesh::feature_normal(const ClosestPoint& cp) const {
    const auto& t = triangles_[cp.triangle];
    switch (cp.feature) {
        case TriFeature::Face: return face_normals_[cp.triangle];
        case TriFeature::Edge01: return edge_normals_[cp.triangle][0];
        case TriFeature::Edge12: return edge_normals_[cp.triangle][1];
        case TriFeature::Edge20: return edge_normals_[cp.triangle][2];
        case TriFeature::Vertex0: return vertex_normals_[t[0]];
        case TriFeature::Vertex1: return vertex_normals_[t[1]];
        case TriFeature::Vertex2: return vertex_normals_[t[2]];
    }
    return face_normals_[cp.triangle];
}

ClosestPoint TriMesh::closest_point(const Vec3& p) const {
    ClosestPoint best;
    double best_d2 = std::numeric_limits<double>::infinity();
    std::uint32_t stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        if (node.box.squared_distance(p) > best_d2) continue;
        if (node.count > 0) {
            for (std::uint32_t k = node.first; k < node.first + node.count; ++k) {
                const std::uint32_t tri = order_[k];
                if (tri_boxes_[tri].squared_distance(p) > best_d2) continue;
                const auto [a, b, c] = corners(tri);
                TriFeature f;
                const Vec3 q = closest_point_on_triangle(p, a, b, c, &f);
                const double d2 = (q - p).squaredNorm();
                if (d2 < best_d2 || (d2 == best_d2 && tri < best.triangle)) {
                    best_d2 = d2;
                    best = {q, tri, f, 0.0};
                }
            }
            continue;
        }
        const double dl = nodes_[node.first].box.squared_distance(p);
        const double dr = nodes_[node.right].box.squared_distance(p);
        // push the farther child first so the nearer one is explored first
        if (dl <= dr) {
            stack[top++] = node.right;
            stack[top++] = node.first;
        } else {
            stack[top++] = node.first;
            stack[top++] = node.right;
        }
    }
    best.distance = std::sqrt(best_d2);
    return best;
}

double TriMesh::signed_distance(const Vec3& p, ClosestPoint* closest) const {
    const ClosestPoint cp = closest_point(p);
    if (closest) *closest = cp;
    const double side = (p - cp.point).dot(feature_normal(cp));
    return side < 0.0 ? -cp.distance : cp.distance;
}

std::optional<SegmentHit> TriMesh::first_hit(const Vec3& a, const Vec3& b) const {
    std::optional<SegmentHit> best;
    double best_t = 1.0;
    std::uint32_t stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        if (!node.box.intersects_segment(a, a + best_t * (b - a))) continue;
        if (node.count > 0) {
            for (std::uint32_t k = node.first; k < node.first + node.count; ++k) {
                const std::uint32_t tri = order_[k];
                const auto [p0, p1, p2] = corners(tri);
                const auto t = segment_triangle_intersection(a, b, p0, p1, p2);
                if (t && (!best || *t < best_t || (*t == best_t && tri < best->triangle))) {
                    best_t = *t;
                    best = SegmentHit{*t, tri, a + *t * (b - a)};
                }
            }
            continue;
        }
        stack[top++] = node.right;
        stack[top++] = node.first;
    }
    return best;
}

SegmentClosest TriMesh::closest_to_segment(const Vec3& a, const Vec3& b) const {
    SegmentClosest best;
    double best_d2 = std::numeric_limits<double>::infinity();
    Aabb seg_box;
    seg_box.extend(a);
    seg_box.extend(b);
    auto consider = [&](double d2, const Vec3& mesh_pt, const Vec3& seg_pt, double s, std::size_t tri) {
        if (d2 < best_d2 || (d2 == best_d2 && tri < best.triangle)) {
            best_d2 = d2;
            best = {mesh_pt, seg_pt, s, tri, 0.0};
        }
    };
    const Vec3 d = b - a;
    const double len2 = d.squaredNorm();
    std::uint32_t stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        if (node.box.squared_distance(seg_box) > best_d2) continue;
        if (node.count == 0) {
            stack[top++] = node.right;
            stack[top++] = node.first;
            continue;
        }
        for (std::uint32_t k = node.first; k < node.first + node.count; ++k) {
            const std::uint32_t tri = order_[k];
            if (tri_boxes_[tri].squared_distance(seg_box) > best_d2) continue;
            const auto [p0, p1, p2] = corners(tri);
            if (len2 > 0.0) {
                if (const auto t = segment_triangle_intersection(a, b, p0, p1, p2)) {
                    const Vec3 x = a + *t * d;
                    consider(0.0, x, x, *t, tri);
                    continue;
                }
            }
            for (int e = 0; e < 2; ++e) {
                const Vec3& end = e == 0 ? a : b;
                const Vec3 q = closest_point_on_triangle(end, p0, p1, p2);
                consider((q - end).squaredNorm(), q, end, e, tri);
            }
            if (len2 > 0.0) {
                const std::array<Vec3, 3> pts{p0, p1, p2};
                for (int e = 0; e < 3; ++e) {
                    double s, t;
                    Vec3 c1, c2;
                    const double d2 = closest_segment_segment(a, b, pts[e], pts[(e + 1) % 3], s, t, c1, c2);
                    consider(d2, c2, c1, s, tri);
                }
            }
        }
    }
    best.distance = std::sqrt(best_d2);
    return best;
}

// ---------------------------------------------------------------------------
// File formats

TriMesh parse_obj(const std::string& text, const std::string& source, const TriMesh::Options& options) {
    std::vector<Vec3> verts;
    std::vector<TriIndices> tris;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    auto resolve = [&](const std::string& tok) -> std::uint32_t {
        const std::string head = tok.substr(0, tok.find('/'));
        long idx = 0;
        try {
            std::size_t used = 0;
            idx = std::stol(head, &used);
            if (used != head.size()) throw std::invalid_argument(head);
        } catch (const std::exception&) {
            throw ParseError(source, lineno, "bad face index '" + tok + "'");
        }
        const long n = static_cast<long>(verts.size());
        const long zero_based = idx > 0 ? idx - 1 : n + idx;
        if (idx == 0 || zero_based < 0 || zero_based >= n)
            throw ParseError(source, lineno, "face index " + std::to_string(idx) + " out of range");
        return static_cast<std::uint32_t>(zero_based);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z)) throw ParseError(source, lineno, "vertex needs three coordinates");
            verts.emplace_back(x, y, z);
        } else if (tag == "f") {
            std::vector<std::string> toks;
            std::string tok;
            while (ls >> tok) toks.push_back(tok);
            if (toks.size() != 3)
                throw ParseError(source, lineno, "only triangular faces are supported (got " +
                                                     std::to_string(toks.size()) + " vertices)");
            tris.push_back({resolve(toks[0]), resolve(toks[1]), resolve(toks[2])});
        }
        // other records (vn, vt, o, g, s, usemtl, mtllib) carry nothing the mesh needs
    }
    if (tris.empty()) throw EmptyMesh(source + ": no triangles");
    return TriMesh(std::move(verts), std::move(tris), options);
}

TriMesh parse_binary_stl(const std::string& bytes, const std::string& source, const TriMesh::Options& options) {
    if (bytes.size() < 84) throw ParseError(source, 0, "binary STL shorter than its 84-byte header");
    std::uint32_t count = 0;
    std::memcpy(&count, bytes.data() + 80, 4);
    if (bytes.size() != 84 + 50ull * count) {
        if (bytes.compare(0, 5, "solid") == 0) throw ParseError(source, 0, "ASCII STL is not supported");
        throw ParseError(source, 0, "binary STL size does not match its triangle count");
    }
    std::vector<Vec3> verts;
    std::vector<TriIndices> tris;
    std::map<std::array<float, 3>, std::uint32_t> index;
    for (std::uint32_t i = 0; i < count; ++i) {
        const char* rec = bytes.data() + 84 + 50ull * i;
        TriIndices t{};
        for (int k = 0; k < 3; ++k) {
            std::array<float, 3> f{};
            std::memcpy(f.data(), rec + 12 + 12 * k, 12);
            auto [it, inserted] = index.try_emplace(f, static_cast<std::uint32_t>(verts.size()));
            if (inserted) verts.emplace_back(f[0], f[1], f[2]);
            t[k] = it->second;
        }
        tris.push_back(t);
    }
    if (tris.empty()) throw EmptyMesh(source + ": no triangles");
    return TriMesh(std::move(verts), std::move(tris), options);
}

TriMesh load_mesh(const std::filesystem::path& path, const TriMesh::Options& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string(), 0, "cannot open mesh file");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".stl") return parse_binary_stl(bytes, path.string(), options);
    if (ext == ".obj") return parse_obj(bytes, path.string(), options);
    throw ParseError(path.string(), 0, "unsupported mesh extension '" + ext + "' (expected .obj or .stl)");
}

void write_obj(const std::filesystem::path& path, const std::vector<Vec3>& vertices,
               const std::vector<TriIndices>& triangles) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out.precision(17);
    for (const auto& v : vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const auto& t : triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void write_binary_stl(const std::filesystem::path& path, const std::vector<Vec3>& vertices,
                      const std::vector<TriIndices>& triangles) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    char header[80] = "binary STL";
    out.write(header, 80);
    const auto count = static_cast<std::uint32_t>(triangles.size());
    out.write(reinterpret_cast<const char*>(&count), 4);
    for (const auto& t : triangles) {
        const Vec3 n = (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]).normalized();
        float rec[12];
        for (int k = 0; k < 3; ++k) rec[k] = static_cast<float>(n[k]);
        for (int v = 0; v < 3; ++v)
            for (int k = 0; k < 3; ++k) rec[3 + 3 * v + k] = static_cast<float>(vertices[t[v]][k]);
        out.write(reinterpret_cast<const char*>(rec), sizeof rec);
        const std::uint16_t attr = 0;
        out.write(reinterpret_cast<const char*>(&attr), 2);
    }
}

// ---------------------------------------------------------------------------
// Generators

TriMesh make_icosphere(double radius, int subdivisions, const Vec3& center) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> v = {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
                           {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
    for (auto& p : v) p.normalize();
    std::vector<TriIndices> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                                 {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                                 {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::uint64_t, std::uint32_t> mid;
        auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
            const auto key = edge_key(a, b);
            if (auto it = mid.find(key); it != mid.end()) return it->second;
            v.push_back((v[a] + v[b]).normalized());
            const auto idx = static_cast<std::uint32_t>(v.size() - 1);
            mid.emplace(key, idx);
            return idx;
        };
        std::vector<TriIndices> next;
        next.reserve(f.size() * 4);
        for (const auto& t : f) {
            const auto ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        f = std::move(next);
    }
    for (auto& t : f) {
        const Vec3 n = (v[t[1]] - v[t[0]]).cross(v[t[2]] - v[t[0]]);
        if (n.dot(v[t[0]] + v[t[1]] + v[t[2]]) < 0.0) std::swap(t[1], t[2]);
    }
    for (auto& p : v) p = center + radius * p;
    return TriMesh(std::move(v), std::move(f));
}

TriMesh make_box(const Vec3& extents, const Vec3& center) {
    const Vec3 h = 0.5 * extents;
    std::vector<Vec3> v;
    for (int i = 0; i < 8; ++i)
        v.push_back(center + Vec3((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(), (i & 4) ? h.z() : -h.z()));
    std::vector<TriIndices> f = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                                 {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
    for (auto& t : f) {
        const Vec3 n = (v[t[1]] - v[t[0]]).cross(v[t[2]] - v[t[0]]);
        if (n.dot(v[t[0]] + v[t[1]] + v[t[2]] - 3.0 * center) < 0.0) std::swap(t[1], t[2]);
    }
    return TriMesh(std::move(v), std::move(f));
}

TriMesh make_plate(double size, double height, int cells, const Vec3& center) {
    std::vector<Vec3> v;
    std::vector<TriIndices> f;
    const int n = std::max(1, cells);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            v.emplace_back(center.x() + size * (static_cast<double>(i) / n - 0.5),
                           center.y() + size * (static_cast<double>(j) / n - 0.5), height);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const auto a = static_cast<std::uint32_t>(j * (n + 1) + i);
            const auto b = a + 1, c = a + static_cast<std::uint32_t>(n + 1), d = c + 1;
            f.push_back({a, b, d});
            f.push_back({a, d, c});
        }
    return TriMesh(std::move(v), std::move(f));
}

double car_panel_seam_y(double x) { return 0.10 + 0.04 * std::sin(std::numbers::pi * x / 0.5); }

double car_panel_height(double x, double y) {
    // crowned roof-like panel with a shallow swage ridge along the seam curve
    const double crown = 0.05 * std::cos(std::numbers::pi * x / 0.9) * std::cos(std::numbers::pi * y / 0.7);
    const double swage = 0.006 * std::exp(-std::pow((y - car_panel_seam_y(x)) / 0.02, 2));
    return -0.12 + crown + swage;
}

TriMesh make_car_panel(int cells_x, int cells_y) {
    constexpr double x0 = -0.35, x1 = 0.35, y0 = -0.25, y1 = 0.25;
    std::vector<Vec3> v;
    std::vector<TriIndices> f;
    for (int j = 0; j <= cells_y; ++j)
        for (int i = 0; i <= cells_x; ++i) {
            const double x = x0 + (x1 - x0) * i / cells_x;
            const double y = y0 + (y1 - y0) * j / cells_y;
            v.emplace_back(x, y, car_panel_height(x, y));
        }
    for (int j = 0; j < cells_y; ++j)
        for (int i = 0; i < cells_x; ++i) {
            const auto a = static_cast<std::uint32_t>(j * (cells_x + 1) + i);
            const auto b = a + 1, c = a + static_cast<std::uint32_t>(cells_x + 1), d = c + 1;
            f.push_back({a, b, d});
            f.push_back({a, d, c});
        }
    return TriMesh(std::move(v), std::move(f));
}

}  // namespace shw
