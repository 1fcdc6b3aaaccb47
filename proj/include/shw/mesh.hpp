#pragma once

#include "shw/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace shw {

using TriIndices = std::array<std::uint32_t, 3>;

/// Which part of a triangle a closest point lies on.
enum class TriFeature : std::uint8_t { Face, Edge01, Edge12, Edge20, Vertex0, Vertex1, Vertex2 };

struct Aabb {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

    void extend(const Vec3& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    void extend(const Aabb& b) {
        lo = lo.cwiseMin(b.lo);
        hi = hi.cwiseMax(b.hi);
    }
    double squared_distance(const Vec3& p) const {
        return (lo - p).cwiseMax(p - hi).cwiseMax(0.0).squaredNorm();
    }
    double squared_distance(const Aabb& b) const {
        return (lo - b.hi).cwiseMax(b.lo - hi).cwiseMax(0.0).squaredNorm();
    }
    /// Slab test for the segment a + t·(b − a), t ∈ [0, 1].
    bool intersects_segment(const Vec3& a, const Vec3& b) const;
};

struct ClosestPoint {
    Vec3 point = Vec3::Zero();
    std::size_t triangle = 0;
    TriFeature feature = TriFeature::Face;
    double distance = std::numeric_limits<double>::infinity();
};

struct SegmentHit {
    double t = 0.0;  // parameter along the segment, [0, 1]
    std::size_t triangle = 0;
    Vec3 point = Vec3::Zero();
};

struct SegmentClosest {
    Vec3 mesh_point = Vec3::Zero();
    Vec3 segment_point = Vec3::Zero();
    double segment_t = 0.0;
    std::size_t triangle = 0;
    double distance = std::numeric_limits<double>::infinity();
};

/// Closest point on triangle (a, b, c) to p, with the feature it lies on.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c, TriFeature* feature = nullptr);

/// Two-sided segment/triangle intersection; returns the segment parameter.
std::optional<double> segment_triangle_intersection(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b,
                                                    const Vec3& c);

/// Indexed triangle mesh with a bounding-volume hierarchy and angle-weighted
/// pseudo-normals for inside/outside classification. Immutable after construction.
class TriMesh {
public:
    struct Options {
        /// Reverse the winding of every triangle (flips outward normals).
        bool flip_winding = false;
        double min_triangle_area = 1e-12;
    };

    TriMesh(std::vector<Vec3> vertices, std::vector<TriIndices> triangles, const Options& options);
    TriMesh(std::vector<Vec3> vertices, std::vector<TriIndices> triangles)
        : TriMesh(std::move(vertices), std::move(triangles), Options{}) {}

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<TriIndices>& triangles() const { return triangles_; }
    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t triangle_count() const { return triangles_.size(); }
    const std::vector<std::string>& warnings() const { return warnings_; }
    const Aabb& bounds() const { return nodes_.front().box; }

    std::array<Vec3, 3> corners(std::size_t tri) const {
        const auto& t = triangles_[tri];
        return {vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]};
    }
    const Vec3& face_normal(std::size_t tri) const { return face_normals_[tri]; }
    /// Outward pseudo-normal of the feature a closest point lies on.
    Vec3 feature_normal(const ClosestPoint& cp) const;

    ClosestPoint closest_point(const Vec3& p) const;
    /// Negative inside (behind the surface), positive outside.
    double signed_distance(const Vec3& p, ClosestPoint* closest = nullptr) const;
    /// Earliest crossing of segment a→b with any triangle.
    std::optional<SegmentHit> first_hit(const Vec3& a, const Vec3& b) const;
    /// Closest pair between segment a→b and the mesh.
    SegmentClosest closest_to_segment(const Vec3& a, const Vec3& b) const;

private:
    struct Node {
        Aabb box;
        std::uint32_t first = 0;  // leaf: first slot in order_; inner: left child
        std::uint32_t count = 0;  // 0 for inner nodes
        std::uint32_t right = 0;
    };

    void cleanup(const Options& options);
    void build_normals();
    void build_bvh();
    std::uint32_t build_node(std::uint32_t begin, std::uint32_t end);

    std::vector<Vec3> vertices_;
    std::vector<TriIndices> triangles_;
    std::vector<Vec3> face_normals_;
    std::vector<Vec3> vertex_normals_;
    std::vector<std::array<Vec3, 3>> edge_normals_;  // per triangle, edges 01, 12, 20
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> order_;
    std::vector<Aabb> tri_boxes_;
    std::vector<std::string> warnings_;
};

/// Load an OBJ (v/f records, triangles only) or binary STL file, chosen by extension.
TriMesh load_mesh(const std::filesystem::path& path, const TriMesh::Options& options = {});
TriMesh parse_obj(const std::string& text, const std::string& source = "<obj>", const TriMesh::Options& options = {});
TriMesh parse_binary_stl(const std::string& bytes, const std::string& source = "<stl>",
                         const TriMesh::Options& options = {});

void write_obj(const std::filesystem::path& path, const std::vector<Vec3>& vertices,
               const std::vector<TriIndices>& triangles);
void write_binary_stl(const std::filesystem::path& path, const std::vector<Vec3>& vertices,
                      const std::vector<TriIndices>& triangles);

/// Closed icosphere with outward winding.
TriMesh make_icosphere(double radius, int subdivisions, const Vec3& center = Vec3::Zero());
/// Closed axis-aligned box, 12 triangles.
TriMesh make_box(const Vec3& extents, const Vec3& center = Vec3::Zero());
/// Open square plate in the plane z = height, normal +z, `cells`² quads.
TriMesh make_plate(double size, double height, int cells = 1, const Vec3& center = Vec3::Zero());

/// y coordinate of the seam ridge on the procedural car panel at x.
double car_panel_seam_y(double x);
/// Height of the procedural car-body panel at (x, y).
double car_panel_height(double x, double y);
/// Procedural curved car-body panel as a height field over a grid of
/// `cells_x` × `cells_y` quads (2 triangles each).
TriMesh make_car_panel(int cells_x, int cells_y);

}  // namespace shw
