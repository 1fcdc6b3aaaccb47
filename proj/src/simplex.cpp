#include "shw/detail/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace shw::detail {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kCostTol = 1e-11;

class Tableau {
public:
    // rows 0..m-1 constraints, row m objective; last column is the rhs
    Tableau(Eigen::MatrixXd t, std::vector<int> basis) : t_(std::move(t)), basis_(std::move(basis)) {}

    int rows() const { return static_cast<int>(basis_.size()); }
    int cols() const { return static_cast<int>(t_.cols()) - 1; }
    Eigen::MatrixXd& t() { return t_; }
    std::vector<int>& basis() { return basis_; }

    void pivot(int r, int c) {
        t_.row(r) /= t_(r, c);
        for (int i = 0; i < t_.rows(); ++i) {
            if (i == r) continue;
            const double f = t_(i, c);
            if (f != 0.0) t_.row(i) -= f * t_.row(r);
        }
        basis_[r] = c;
    }

    // Runs simplex iterations on columns [0, allowed). Returns Unbounded, Optimal or IterationLimit.
    LpStatus iterate(int allowed, int& iterations, int cap) {
        const int m = rows();
        const int rhs = cols();
        while (iterations < cap) {
            int enter = -1;
            for (int j = 0; j < allowed; ++j) {
                if (t_(m, j) < -kCostTol) {
                    enter = j;  // Bland: first improving column
                    break;
                }
            }
            if (enter < 0) return LpStatus::Optimal;
            int leave = -1;
            double best = 0.0;
            for (int i = 0; i < m; ++i) {
                const double a = t_(i, enter);
                if (a <= kPivotTol) continue;
                const double ratio = t_(i, rhs) / a;
                if (leave < 0 || ratio < best - 1e-14 ||
                    (std::abs(ratio - best) <= 1e-14 && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave < 0) return LpStatus::Unbounded;
            pivot(leave, enter);
            ++iterations;
        }
        return LpStatus::IterationLimit;
    }

    void remove_row(int r) {
        const int n = static_cast<int>(t_.rows());
        Eigen::MatrixXd next(n - 1, t_.cols());
        next.topRows(r) = t_.topRows(r);
        next.bottomRows(n - 1 - r) = t_.bottomRows(n - 1 - r);
        t_ = std::move(next);
        basis_.erase(basis_.begin() + r);
    }

private:
    Eigen::MatrixXd t_;
    std::vector<int> basis_;
};

}  // namespace

LpResult solve_standard_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    const int cap = 50 * (m + n) + 100;

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
    for (int i = 0; i < m; ++i) {
        const double sign = b[i] < 0.0 ? -1.0 : 1.0;
        t.row(i).head(n) = sign * a.row(i);
        t(i, n + i) = 1.0;
        t(i, n + m) = sign * b[i];
    }
    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + i;
    // phase 1 objective: sum of artificials, expressed in nonbasic columns
    for (int i = 0; i < m; ++i) t.row(m) -= t.row(i);
    for (int i = 0; i < m; ++i) t(m, n + i) = 0.0;

    Tableau tab(std::move(t), std::move(basis));
    LpResult result;
    LpStatus st = tab.iterate(n, result.iterations, cap);
    if (st == LpStatus::IterationLimit) {
        result.status = st;
        return result;
    }
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    const int rhs = n + m;
    if (-tab.t()(tab.rows(), rhs) > 1e-9 * scale) {
        result.status = LpStatus::Infeasible;
        return result;
    }

    // drive zero-level artificials out of the basis; rows that cannot pivot are redundant
    for (int r = tab.rows() - 1; r >= 0; --r) {
        if (tab.basis()[r] < n) continue;
        int col = -1;
        for (int j = 0; j < n; ++j) {
            if (std::abs(tab.t()(r, j)) > 1e-9) {
                col = j;
                break;
            }
        }
        if (col >= 0)
            tab.pivot(r, col);
        else
            tab.remove_row(r);
    }

    // phase 2 objective row
    const int rows = tab.rows();
    tab.t().row(rows).setZero();
    tab.t().row(rows).head(n) = c.transpose();
    for (int i = 0; i < rows; ++i) {
        const double cb = c[tab.basis()[i]];
        if (cb != 0.0) tab.t().row(rows) -= cb * tab.t().row(i);
    }
    st = tab.iterate(n, result.iterations, cap);
    result.status = st;
    if (st != LpStatus::Optimal) return result;

    result.x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < rows; ++i) result.x[tab.basis()[i]] = std::max(0.0, tab.t()(i, rhs));
    result.objective = c.dot(result.x);
    return result;
}

}  // namespace shw::detail
