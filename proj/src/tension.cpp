#include "shw/tension.hpp"

#include "shw/detail/simplex.hpp"
#include "shw/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace shw {

namespace {

constexpr int kMaxActiveSetIterations = 100;
constexpr double kRankTol = 1e-10;

using RowBlock = Eigen::Matrix<double, Eigen::Dynamic, 8, 0, 6, 8>;
using RowVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 6, 1>;

// Equality constraints A·t = w reduced to r independent rows B·t = b.
struct ReducedSystem {
    RowBlock b_mat;
    RowVec b_vec;
    bool consistent = true;
    double condition = 0.0;
};

ReducedSystem reduce(const StructureMatrix& a, const Wrench& w) {
    Eigen::JacobiSVD<Eigen::Matrix<double, 6, 8>> svd(a, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    int r = 0;
    if (s[0] > 0.0)
        for (int i = 0; i < 6; ++i)
            if (s[i] > kRankTol * s[0]) ++r;
    ReducedSystem out;
    out.condition = (r == 6) ? s[0] / s[5] : std::numeric_limits<double>::infinity();
    const Eigen::MatrixXd ur = svd.matrixU().leftCols(r);
    out.b_mat = ur.transpose() * a;
    out.b_vec = ur.transpose() * w;
    const Wrench perp = w - ur * out.b_vec;
    out.consistent = perp.cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, w.cwiseAbs().maxCoeff());
    return out;
}

// Any t with B·t = b inside the bounds, from the simplex feasibility phase.
bool feasible_point(const ReducedSystem& sys, const TensionBounds& bounds, Tensions& t) {
    const int r = static_cast<int>(sys.b_mat.rows());
    const int n = 8;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(r + n, 2 * n);
    Eigen::VectorXd rhs(r + n);
    const Tensions lo = Tensions::Constant(bounds.min);
    a.topLeftCorner(r, n) = sys.b_mat;
    rhs.head(r) = sys.b_vec - sys.b_mat * lo;
    a.bottomLeftCorner(n, n).setIdentity();
    a.bottomRightCorner(n, n).setIdentity();
    rhs.tail(n).setConstant(bounds.max - bounds.min);
    const auto lp = detail::solve_standard_lp(Eigen::VectorXd::Zero(2 * n), a, rhs);
    if (lp.status != detail::LpStatus::Optimal) return false;
    t = (lo + lp.x.head(n)).cwiseMax(bounds.min).cwiseMin(bounds.max);
    return true;
}

void finish(TensionSolveReport& rep, const StructureMatrix& a, const Wrench& w, const TensionBounds& bounds) {
    rep.residual_norm = (a * rep.tensions - w).cwiseAbs().maxCoeff();
    rep.objective = (rep.tensions.array() - bounds.mid()).matrix().squaredNorm();
}

}  // namespace

std::string_view to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "Optimal";
        case SolveStatus::Infeasible: return "Infeasible";
        case SolveStatus::NumericalFailure: return "NumericalFailure";
    }
    return "Unknown";
}

TensionSolveReport solve_tensions(const StructureMatrix& a, const Wrench& wrench, const TensionBounds& bounds) {
    if (!a.allFinite() || !wrench.allFinite()) throw InvalidInput("solve_tensions: non-finite input");
    if (!(bounds.min > 0.0) || !(bounds.min < bounds.max))
        throw InvalidInput("solve_tensions: tension bounds must satisfy 0 < min < max");

    TensionSolveReport rep;
    const ReducedSystem sys = reduce(a, wrench);
    rep.condition_estimate = sys.condition;
    if (!sys.consistent) {
        rep.status = SolveStatus::Infeasible;
        return rep;
    }

    const int r = static_cast<int>(sys.b_mat.rows());
    const Tensions mid = Tensions::Constant(bounds.mid());
    const auto& bm = sys.b_mat;

    // Minimum-distance point of the affine set; done if it already respects the bounds.
    Tensions t = mid;
    if (r > 0) {
        const Eigen::MatrixXd gram = bm * bm.transpose();
        t += bm.transpose() * gram.ldlt().solve(sys.b_vec - bm * mid);
    }
    if ((t.array() >= bounds.min).all() && (t.array() <= bounds.max).all()) {
        rep.tensions = t;
        rep.status = SolveStatus::Optimal;
        finish(rep, a, wrench, bounds);
        return rep;
    }

    if (!feasible_point(sys, bounds, t)) {
        rep.status = SolveStatus::Infeasible;
        return rep;
    }

    // Primal active set over the bound constraints; 0 free, -1 at min, +1 at max.
    // Blocking constraints are never in the span of the working set, so B
    // restricted to the free columns keeps full row rank.
    std::array<int, 8> state{};
    bool converged = false;
    int it = 0;
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(r);
    for (; it < kMaxActiveSetIterations; ++it) {
        std::array<int, 8> free_idx{};
        int k = 0;
        for (int i = 0; i < 8; ++i)
            if (state[i] == 0) free_idx[k++] = i;
        const Tensions g = t - mid;

        Eigen::VectorXd gf(k);
        Eigen::MatrixXd bf(r, k);
        for (int j = 0; j < k; ++j) {
            gf[j] = g[free_idx[j]];
            bf.col(j) = bm.col(free_idx[j]);
        }
        if (r > 0 && k > 0)
            mu = bf.transpose().colPivHouseholderQr().solve(-gf);
        else
            mu.setZero();
        const Eigen::VectorXd pf = (k > 0) ? Eigen::VectorXd(-(gf + bf.transpose() * mu)) : Eigen::VectorXd();

        const double pnorm = k > 0 ? pf.cwiseAbs().maxCoeff() : 0.0;
        if (pnorm <= 1e-12 * (1.0 + t.cwiseAbs().maxCoeff())) {
            const Tensions full = g + bm.transpose() * mu;
            int drop = -1;
            double worst = -1e-9;
            for (int i = 0; i < 8; ++i) {
                if (state[i] == 0) continue;
                const double lambda = state[i] < 0 ? full[i] : -full[i];
                if (lambda < worst) {
                    worst = lambda;
                    drop = i;
                }
            }
            if (drop < 0) {
                converged = true;
                break;
            }
            state[drop] = 0;
            continue;
        }

        double alpha = 1.0;
        int block = -1;
        for (int j = 0; j < k; ++j) {
            const int i = free_idx[j];
            double step = std::numeric_limits<double>::infinity();
            if (pf[j] < 0.0)
                step = (bounds.min - t[i]) / pf[j];
            else if (pf[j] > 0.0)
                step = (bounds.max - t[i]) / pf[j];
            if (step < alpha) {
                alpha = std::max(0.0, step);
                block = i;
            }
        }
        Tensions p = Tensions::Zero();
        for (int j = 0; j < k; ++j) p[free_idx[j]] = pf[j];
        t += alpha * p;
        if (block >= 0) {
            state[block] = p[block] < 0.0 ? -1 : +1;
            t[block] = state[block] < 0 ? bounds.min : bounds.max;
        }
    }
    rep.iterations = it;
    if (!converged) {
        rep.tensions = t;
        rep.status = SolveStatus::NumericalFailure;
        finish(rep, a, wrench, bounds);
        return rep;
    }

    // Remove the small equality drift accumulated by the feasibility phase.
    {
        std::array<int, 8> free_idx{};
        int k = 0;
        for (int i = 0; i < 8; ++i)
            if (state[i] == 0) free_idx[k++] = i;
        if (r > 0 && k > 0) {
            Eigen::MatrixXd bf(r, k);
            for (int j = 0; j < k; ++j) bf.col(j) = bm.col(free_idx[j]);
            const Eigen::VectorXd defect = sys.b_vec - bm * t;
            const Eigen::VectorXd corr = bf.transpose() * (bf * bf.transpose()).ldlt().solve(defect);
            for (int j = 0; j < k; ++j)
                t[free_idx[j]] = std::clamp(t[free_idx[j]] + corr[j], bounds.min, bounds.max);
        }
    }

    rep.tensions = t;
    rep.status = SolveStatus::Optimal;
    finish(rep, a, wrench, bounds);
    return rep;
}

TensionSolveReport pretension(const StructureMatrix& a, const TensionBounds& bounds) {
    return solve_tensions(a, Wrench::Zero(), bounds);
}

double wrench_capability(const StructureMatrix& a, const TensionBounds& bounds, const Wrench& direction) {
    if (std::abs(direction.norm() - 1.0) > 1e-9) throw InvalidInput("wrench_capability: direction must be unit norm");
    if (!pretension(a, bounds).feasible()) return 0.0;

    // variables: x = t - t_min (8), slack y (8), s (1); maximize s
    constexpr int n = 8;
    Eigen::MatrixXd lp_a = Eigen::MatrixXd::Zero(6 + n, 2 * n + 1);
    Eigen::VectorXd rhs(6 + n);
    lp_a.topLeftCorner(6, n) = a;
    lp_a.block(0, 2 * n, 6, 1) = -direction;
    rhs.head(6) = -(a * Tensions::Constant(bounds.min));
    lp_a.block(6, 0, n, n).setIdentity();
    lp_a.block(6, n, n, n).setIdentity();
    rhs.tail(n).setConstant(bounds.max - bounds.min);
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(2 * n + 1);
    cost[2 * n] = -1.0;
    const auto lp = detail::solve_standard_lp(cost, lp_a, rhs);
    if (lp.status == detail::LpStatus::Unbounded) return std::numeric_limits<double>::infinity();
    if (lp.status != detail::LpStatus::Optimal) return 0.0;
    return lp.x[2 * n];
}

double axis_capability(const StructureMatrix& a, const TensionBounds& bounds, bool torque) {
    double best = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < 3; ++axis) {
        for (double sign : {1.0, -1.0}) {
            Wrench d = Wrench::Zero();
            d[(torque ? 3 : 0) + axis] = sign;
            best = std::min(best, wrench_capability(a, bounds, d));
        }
    }
    return best;
}

}  // namespace shw
