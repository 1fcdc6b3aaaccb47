#include "shw/kinematics.hpp"

#include "shw/errors.hpp"

#include <cmath>
#include <sstream>

namespace shw {

namespace {

double rms(const StringLengths& r) { return std::sqrt(r.squaredNorm() / static_cast<double>(kStringCount)); }

GripPose apply_increment(const GripPose& pose, const Eigen::Matrix<double, 6, 1>& delta) {
    return {pose.position() + delta.head<3>(), quat_from_rotation_vector(delta.tail<3>()) * pose.orientation()};
}

}  // namespace

StringLengths length_residuals(const RigConfig& rig, const StringLengths& lengths, const GripPose& pose) {
    return string_lengths(rig, pose) - lengths;
}

Eigen::Matrix<double, 8, 6> length_jacobian(const RigConfig& rig, const GripPose& pose) {
    return -build_structure_matrix(rig, pose).transpose();
}

PoseEstimate estimate_pose(const RigConfig& rig, const StringLengths& lengths, const GripPose& initial_guess,
                           const PoseEstimatorOptions& options) {
    if (!(lengths.array() > 0.0).all() || !lengths.allFinite())
        throw InvalidInput("estimate_pose: lengths must be positive and finite");

    GripPose pose = initial_guess;
    StringLengths r = length_residuals(rig, lengths, pose);
    double cost = r.squaredNorm();
    double lambda = options.initial_damping;
    bool converged = false;
    bool moved = false;
    int it = 0;

    for (; it < options.max_iterations; ++it) {
        const Eigen::Matrix<double, 8, 6> jac = length_jacobian(rig, pose);
        const Eigen::Matrix<double, 6, 6> jtj = jac.transpose() * jac;
        const Eigen::Matrix<double, 6, 1> grad = jac.transpose() * r;

        // inner loop: raise damping until the step reduces the cost
        bool accepted = false;
        Eigen::Matrix<double, 6, 1> delta;
        while (lambda < 1e12) {
            Eigen::Matrix<double, 6, 6> lhs = jtj;
            lhs.diagonal().array() += lambda * (1.0 + jtj.diagonal().array());
            delta = lhs.ldlt().solve(-grad);
            const GripPose trial = apply_increment(pose, delta);
            StringLengths r_trial;
            try {
                r_trial = length_residuals(rig, lengths, trial);
            } catch (const DegenerateString&) {
                lambda *= 10.0;
                continue;
            }
            const double trial_cost = r_trial.squaredNorm();
            if (trial_cost <= cost) {
                const double rms_change = std::abs(rms(r) - rms(r_trial));
                pose = trial;
                r = r_trial;
                cost = trial_cost;
                lambda = std::max(lambda / 10.0, 1e-12);
                accepted = true;
                if (delta.norm() >= options.step_tolerance) moved = true;
                if (delta.norm() < options.step_tolerance || rms_change < options.residual_change_tolerance)
                    converged = true;
                break;
            }
            if (delta.norm() < options.step_tolerance) break;
            lambda *= 10.0;
        }
        if (converged) {
            ++it;
            break;
        }
        if (!accepted) {
            // stagnation: no improving step at any damping
            if (rms(r) > options.stall_residual) {
                std::ostringstream msg;
                msg << "estimate_pose stalled after " << it << " iterations, residual_rms " << rms(r) << " m";
                throw NoConvergence(msg.str());
            }
            converged = true;
            break;
        }
    }
    if (!moved && rms(r) > options.stall_residual) {
        std::ostringstream msg;
        msg << "estimate_pose made no progress from the initial guess, residual_rms " << rms(r) << " m";
        throw NoConvergence(msg.str());
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "estimate_pose hit the iteration cap (" << options.max_iterations << "), residual_rms " << rms(r)
            << " m";
        throw NoConvergence(msg.str());
    }

    const Eigen::Matrix<double, 8, 6> jac = length_jacobian(rig, pose);
    Eigen::JacobiSVD<Eigen::Matrix<double, 8, 6>> svd(jac);
    const auto& s = svd.singularValues();
    if (s[0] == 0.0 || s[5] < options.rank_tolerance * s[0]) {
        std::ostringstream msg;
        msg << "estimate_pose: Jacobian rank < 6 at the solution (sigma_min/sigma_max = "
            << (s[0] > 0.0 ? s[5] / s[0] : 0.0) << "); pose is not observable";
        throw RankDeficient(msg.str());
    }
    return {pose, rms(r), it};
}

}  // namespace shw
