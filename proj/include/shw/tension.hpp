#pragma once

#include "shw/rig.hpp"
#include "shw/types.hpp"

#include <cstdint>
#include <string_view>

namespace shw {

enum class SolveStatus : std::uint8_t { Optimal = 0, Infeasible = 1, NumericalFailure = 2 };

std::string_view to_string(SolveStatus s);

struct TensionSolveReport {
    Tensions tensions = Tensions::Zero();
    /// ‖A·t − w‖∞ (N / N·m).
    double residual_norm = 0.0;
    /// ‖t − t_mid‖² (N²).
    double objective = 0.0;
    SolveStatus status = SolveStatus::Infeasible;
    int iterations = 0;
    /// σ_max/σ_min of A; +∞ when rank deficient.
    double condition_estimate = 0.0;

    bool feasible() const { return status == SolveStatus::Optimal; }
};

/// Closest-to-midrange bounded tensions reproducing `wrench`:
///   minimize ‖t − t_mid‖²  s.t.  A·t = w,  t_min ≤ t ≤ t_max.
/// Infeasible wrenches are reported, never scaled.
TensionSolveReport solve_tensions(const StructureMatrix& a, const Wrench& wrench, const TensionBounds& bounds);

/// solve_tensions with w = 0; Optimal iff the pose is wrench-closed within bounds.
TensionSolveReport pretension(const StructureMatrix& a, const TensionBounds& bounds);

/// Largest s with s·direction producible by bounded tensions (0 if pretension is infeasible).
/// `direction` must be unit norm.
double wrench_capability(const StructureMatrix& a, const TensionBounds& bounds, const Wrench& direction);

/// Pure-force (`torque = false`) or pure-torque capability: minimum over the six
/// signed axis directions.
double axis_capability(const StructureMatrix& a, const TensionBounds& bounds, bool torque);

}  // namespace shw
