#pragma once

#include <Eigen/Dense>

namespace shw::detail {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Eigen::VectorXd x;
    double objective = 0.0;
    int iterations = 0;
};

/// Dense two-phase simplex with Bland's rule:
///   minimize c·x  subject to  A x = b,  x >= 0.
/// Intended for the small problems of the tension module (≲ 20 rows).
LpResult solve_standard_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

}  // namespace shw::detail
