#pragma once

#include "shw/rig.hpp"

namespace shw {

struct PoseEstimate {
    GripPose pose;
    /// sqrt(mean of squared length residuals), m.
    double residual_rms = 0.0;
    int iterations = 0;
};

struct PoseEstimatorOptions {
    int max_iterations = 100;
    double initial_damping = 1e-3;
    double step_tolerance = 1e-10;
    double residual_change_tolerance = 1e-12;
    /// Residual above which a stalled solve is reported as NoConvergence.
    double stall_residual = 1e-4;
    /// σ_min/σ_max of the Jacobian below which the pose is RankDeficient.
    double rank_tolerance = 1e-9;
};

/// Length residuals r_i = ‖m_i − a_i(pose)‖ − l_i.
StringLengths length_residuals(const RigConfig& rig, const StringLengths& lengths, const GripPose& pose);

/// Jacobian of the length residuals w.r.t. [δp; δθ], where δθ is a world-frame
/// rotation increment applied on the left (q ← exp(δθ)·q). Equals −Aᵀ.
Eigen::Matrix<double, 8, 6> length_jacobian(const RigConfig& rig, const GripPose& pose);

/// Recover the grip pose from measured string lengths by Levenberg-Marquardt.
/// Throws NoConvergence or RankDeficient.
PoseEstimate estimate_pose(const RigConfig& rig, const StringLengths& lengths, const GripPose& initial_guess,
                           const PoseEstimatorOptions& options = {});

}  // namespace shw
