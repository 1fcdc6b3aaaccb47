#pragma once

#include "shw/rig.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace shw {

/// Axis-aligned box sampled at cell centres: cell (i,j,k) centre =
/// lower + (idx + 0.5) · (upper − lower) / resolution.
struct GridSpec {
    Vec3 lower = Vec3::Zero();
    Vec3 upper = Vec3::Zero();
    std::array<int, 3> resolution{2, 2, 2};

    std::size_t cell_count() const {
        return static_cast<std::size_t>(resolution[0]) * resolution[1] * resolution[2];
    }
    /// Linear index = i + nx·(j + ny·k).
    Vec3 cell_center(std::size_t index) const;

    static GridSpec centered(const Vec3& center, const Vec3& extents, std::array<int, 3> resolution) {
        return {center - 0.5 * extents, center + 0.5 * extents, resolution};
    }
};

struct WorkspaceCell {
    Vec3 center = Vec3::Zero();
    bool wrench_closed = false;
    /// σ_max/σ_min of A; +∞ when rank < 6 or the cell is degenerate.
    double condition_number = 0.0;
    double force_capability = 0.0;   // N
    double torque_capability = 0.0;  // N·m
};

struct WorkspaceReport {
    GridSpec grid;
    Quat orientation = Quat::Identity();
    std::vector<WorkspaceCell> cells;  // ordered by linear cell index

    /// Fraction of cells that are wrench-closed.
    double feasible_fraction() const;
};

/// Evaluate wrench closure, conditioning and axis capabilities at every cell
/// centre. `threads` = 0 picks the hardware concurrency.
WorkspaceReport analyze_workspace(const RigConfig& rig, const GridSpec& grid, const Quat& orientation,
                                  unsigned threads = 1);

WorkspaceCell evaluate_cell(const RigConfig& rig, const GripPose& pose);

struct SweepRow {
    double diameter = 0.0;
    double condition_number = 0.0;
    double torque_capability = 0.0;
};

/// Conditioning and torque capability at the rig centre (identity orientation)
/// for each circle diameter, all other parameters held fixed.
std::vector<SweepRow> diameter_sweep(const RigConfig& rig_template, const std::vector<double>& diameters);

/// Comma-separated cell table with a header row.
std::string workspace_to_csv(const WorkspaceReport& report);
/// Structured summary (JSON) with the grid, orientation and aggregate figures.
std::string workspace_summary_json(const WorkspaceReport& report);
/// Inverse of the CSV + summary pair; exact for every finite and infinite value.
WorkspaceReport workspace_from_files(const std::string& csv, const std::string& summary_json);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::string sweep_to_json(const std::vector<SweepRow>& rows);

/// Shortest decimal text that parses back to the same double ("inf" for +∞).
std::string format_double(double v);
double parse_double(const std::string& s);

}  // namespace shw
