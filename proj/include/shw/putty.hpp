#pragma once

#include "shw/mesh.hpp"
#include "shw/types.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace shw {

struct PuttyParams {
    double radius = 0.004;        // m
    double min_spacing = 0.002;   // m
    int ring_segments = 8;
};

struct PuttySample {
    Vec3 position = Vec3::Zero();
    double time = 0.0;  // s
};

/// One continuous extrusion laid while the trigger stayed pressed, with its tube mesh.
struct PuttyBead {
    std::vector<PuttySample> samples;
    double radius = 0.004;
    int ring_segments = 8;
    std::vector<Vec3> tube_vertices;            // ring_segments per sample
    std::vector<TriIndices> tube_triangles;     // 2·ring_segments per consecutive sample pair
    std::vector<Vec3> ring_normals;             // transported ring frame, one per sample

    double arc_length() const;
    bool empty() const { return samples.empty(); }
};

/// All beads laid so far. The last bead is open while the trigger is held.
class PuttyTrail {
public:
    explicit PuttyTrail(PuttyParams params = {}) : params_(params) {}

    /// Feed the tip position for one tick. Pressed: a sample is appended when it
    /// is at least min_spacing from the previous one. Released: the open bead is
    /// closed at the last pressed tip position. Returns the samples appended.
    std::vector<PuttySample> extrude(const Vec3& tip, double time, bool trigger);

    const std::vector<PuttyBead>& beads() const { return beads_; }
    const PuttyParams& params() const { return params_; }
    bool open() const { return open_; }
    std::size_t sample_count() const;

private:
    void append(PuttyBead& bead, const PuttySample& s);

    PuttyParams params_;
    std::vector<PuttyBead> beads_;
    bool open_ = false;
    std::optional<PuttySample> pending_;
};

/// Tip path extrusion on a single bead (one press); convenience over PuttyTrail.
PuttyBead extrude_path(std::span<const Vec3> path, const PuttyParams& params = {}, double dt = 1e-3);

struct SeamPath {
    std::vector<Vec3> points;
    double slip_tolerance = 0.005;  // m

    double length() const;
    /// Throws InvalidInput unless ≥ 2 points and consecutive points are distinct.
    void validate() const;
    /// Distance from p to the polyline.
    double distance(const Vec3& p) const;
    /// Point at arc length s (clamped to the ends).
    Vec3 point_at(double s) const;
    /// Points spaced by at most `spacing` along the polyline, ends included.
    std::vector<Vec3> resample(double spacing) const;
};

/// Text file: one point per line, three decimal fields (m) separated by spaces or commas.
SeamPath load_seam(const std::filesystem::path& path, double slip_tolerance = 0.005);
SeamPath parse_seam(const std::string& text, const std::string& source = "<seam>", double slip_tolerance = 0.005);
void save_seam(const SeamPath& seam, const std::filesystem::path& path);

struct SeamMetrics {
    double coverage = 0.0;       // fraction of seam arc length with a bead sample within tolerance
    double max_deviation = 0.0;  // m, max over bead samples of distance to the seam
    int slip_events = 0;         // maximal runs of consecutive samples beyond tolerance
};

SeamMetrics seam_metrics(const PuttyBead& bead, const SeamPath& seam);
SeamMetrics seam_metrics(std::span<const PuttyBead> beads, const SeamPath& seam);

/// Seam polyline on the procedural car panel.
SeamPath car_panel_seam(double spacing = 0.002);

}  // namespace shw
