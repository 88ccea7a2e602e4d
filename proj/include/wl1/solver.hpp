/**
 * @file solver.hpp
 * @brief Weighted basis pursuit
 *
 *   minimize ||x||_{1,w} = sum_j w_j |x_j|   subject to  A x = b
 *
 * solved as the linear program
 *
 *   minimize w^T (u + v)  subject to  A (u - v) = b,  u, v >= 0
 *
 * with a dense Mehrotra predictor-corrector interior point method. The
 * returned dual vector y certifies optimality: |A^T y|_j <= w_j everywhere
 * and (A^T y)_j = w_j sgn(x_j) on the support of x.
 *
 * Before the interior point iterations the equality system is brought to
 * full row rank with orthogonal transformations. Coordinates with zero
 * weight are eliminated as free variables: the constraints are projected
 * onto the orthogonal complement of range(A_F), where F is the zero-weight
 * index set, and x_F is recovered afterwards as a minimum-norm least
 * squares solution.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace wl1 {

struct BPProblem {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::VectorXd w;  ///< expanded per-coordinate weights, w_j >= 0
};

enum class BPStatus { Optimal, DegenerateWeights, Infeasible, NotConverged };

inline std::string_view status_name(BPStatus s) {
    switch (s) {
        case BPStatus::Optimal: return "optimal";
        case BPStatus::DegenerateWeights: return "degenerate-weights";
        case BPStatus::Infeasible: return "infeasible";
        case BPStatus::NotConverged: return "not-converged";
    }
    return "?";
}

struct BPSolution {
    Eigen::VectorXd x_hat;
    Eigen::VectorXd dual;  ///< y in R^m
    double objective = std::numeric_limits<double>::quiet_NaN();
    BPStatus status = BPStatus::NotConverged;
    int iterations = 0;
    double primal_residual = std::numeric_limits<double>::quiet_NaN();  ///< ||A x - b||_2
    double relative_gap = std::numeric_limits<double>::quiet_NaN();

    /// A minimizer was found (possibly non-unique when some w_j = 0).
    bool solved() const { return status == BPStatus::Optimal || status == BPStatus::DegenerateWeights; }
};

struct BPOptions {
    double tol = 1e-8;
    int max_iterations = 200;
};

namespace detail {

struct LpResult {
    Eigen::VectorXd x;
    Eigen::VectorXd y;
    int iterations = 0;
    double gap = 0.0;
    bool converged = false;
};

/// Largest step keeping z + step * dz >= 0 (infinite if nothing blocks).
inline double max_step(const Eigen::VectorXd& z, const Eigen::VectorXd& dz) {
    double a = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < z.size(); ++i)
        if (dz[i] < 0.0) a = std::min(a, -z[i] / dz[i]);
    return a;
}

/// Crossover from an interior solution to a vertex. Candidate bases are the
/// leading columns ranked by |x_j| / dual slack_j: first the estimated support
/// {j : |x_j| > slack_j}, then a full basis. A candidate replaces (x, y) only
/// if it is feasible, its dual is feasible and the objective does not grow.
inline void purify(const Eigen::MatrixXd& M, const Eigen::VectorXd& rhs, const Eigen::VectorXd& c, LpResult& res,
                   double tol) {
    using Eigen::Index;
    const Index n = M.cols(), m = M.rows();
    const Eigen::VectorXd aty = M.transpose() * res.y;
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::vector<double> ratio(static_cast<std::size_t>(n));
    Index support = 0;
    for (Index j = 0; j < n; ++j) {
        const double slack = std::max(c[j] - std::abs(aty[j]), 0.0);
        ratio[static_cast<std::size_t>(j)] = std::abs(res.x[j]) / std::max(slack, 1e-300);
        order[static_cast<std::size_t>(j)] = j;
        if (std::abs(res.x[j]) > slack) ++support;
    }
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return ratio[static_cast<std::size_t>(a)] > ratio[static_cast<std::size_t>(b)];
    });

    const double before = c.dot(res.x.cwiseAbs());
    for (const Index k : {support, std::min(m, n)}) {
        if (k == 0) continue;
        const std::vector<Index> B(order.begin(), order.begin() + k);
        const Eigen::MatrixXd MB = M(Eigen::all, B);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(MB);
        if (qr.rank() < k) continue;
        const Eigen::VectorXd xb = qr.solve(rhs);
        if ((MB * xb - rhs).norm() > tol * (1.0 + rhs.norm())) continue;
        if (c(B).dot(xb.cwiseAbs()) > before + tol * (1.0 + before)) continue;

        // smallest change to y that makes the basis constraints tight
        Eigen::VectorXd r(k);
        for (Index i = 0; i < k; ++i) {
            const Index j = B[static_cast<std::size_t>(i)];
            const double sgn = xb[i] != 0.0 ? (xb[i] > 0.0 ? 1.0 : -1.0) : (aty[j] >= 0.0 ? 1.0 : -1.0);
            r[i] = sgn * c[j] - aty[j];
        }
        const Eigen::MatrixXd Q1 = Eigen::MatrixXd(qr.householderQ()).leftCols(k);
        const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
        const Eigen::VectorXd y =
            res.y + Q1 * R.transpose().triangularView<Eigen::Lower>().solve(qr.colsPermutation().transpose() * r);
        if (((M.transpose() * y).cwiseAbs() - c).maxCoeff() > tol * (1.0 + c.maxCoeff())) continue;
        res.x.setZero();
        res.x(B) = xb;
        res.y = y;
        return;
    }
}

/// min c^T (u + v) s.t. M (u - v) = rhs, u, v >= 0, c > 0, M full row rank.
inline LpResult split_lp(const Eigen::MatrixXd& M, const Eigen::VectorXd& rhs, const Eigen::VectorXd& c,
                         const BPOptions& opt) {
    using Eigen::VectorXd;
    const Eigen::Index m = M.rows();
    const Eigen::Index n = M.cols();
    LpResult res;
    if (rhs.norm() == 0.0) {
        res.x = VectorXd::Zero(n);
        res.y = VectorXd::Zero(m);
        res.converged = true;
        return res;
    }

    const Eigen::MatrixXd MMt = M * M.transpose();
    Eigen::LLT<Eigen::MatrixXd> llt0(MMt);
    if (llt0.info() != Eigen::Success) throw std::runtime_error("weighted_bp: reduced system is rank deficient");

    // Mehrotra starting point for the split problem; the least-norm y is zero.
    const VectorXd xls = M.transpose() * llt0.solve(rhs);
    VectorXd u = 0.5 * xls, v = -0.5 * xls;
    VectorXd y = VectorXd::Zero(m);
    VectorXd su = c, sv = c;
    {
        const double dz = std::max(0.0, -1.5 * std::min(u.minCoeff(), v.minCoeff()));
        const double ds = std::max(0.0, -1.5 * std::min(su.minCoeff(), sv.minCoeff()));
        u.array() += dz;
        v.array() += dz;
        su.array() += ds;
        sv.array() += ds;
        const double zs = u.dot(su) + v.dot(sv);
        const double hz = 0.5 * zs / (su.sum() + sv.sum());
        const double hs = 0.5 * zs / (u.sum() + v.sum());
        u.array() += hz;
        v.array() += hz;
        su.array() += hs;
        sv.array() += hs;
    }

    const double rhs_scale = 1.0 + rhs.norm();
    const double c_scale = 1.0 + std::sqrt(2.0) * c.norm();
    const double N2 = 2.0 * static_cast<double>(n);

    Eigen::MatrixXd normal(m, m);
    Eigen::LLT<Eigen::MatrixXd> llt;
    for (int it = 0; it < opt.max_iterations; ++it) {
        res.iterations = it;
        const VectorXd Aty = M.transpose() * y;
        const VectorXd rp = rhs - M * (u - v);
        const VectorXd rdu = c - Aty - su;
        const VectorXd rdv = c + Aty - sv;
        const double comp = u.dot(su) + v.dot(sv);
        const double mu = comp / N2;
        const double pobj = c.dot(u + v);
        const double rel_p = rp.norm() / rhs_scale;
        const double rel_d = std::sqrt(rdu.squaredNorm() + rdv.squaredNorm()) / c_scale;
        res.gap = comp / (1.0 + std::abs(pobj));
        if (rel_p <= opt.tol && rel_d <= opt.tol && res.gap <= opt.tol) {
            res.converged = true;
            break;
        }

        const VectorXd du = u.cwiseQuotient(su);
        const VectorXd dv = v.cwiseQuotient(sv);
        const VectorXd dsum = du + dv;
        const Eigen::MatrixXd Ms = M * dsum.cwiseSqrt().asDiagonal();
        normal.setZero();
        normal.selfadjointView<Eigen::Lower>().rankUpdate(Ms);
        llt.compute(normal);
        if (llt.info() != Eigen::Success) {
            normal.diagonal().array() += 1e-14 * (1.0 + normal.diagonal().maxCoeff());
            llt.compute(normal);
            if (llt.info() != Eigen::Success) break;
        }

        // Solves the Newton system for given complementarity right-hand sides.
        auto newton = [&](const VectorXd& rcu, const VectorXd& rcv, VectorXd& dx_u, VectorXd& dx_v, VectorXd& dy,
                          VectorXd& ds_u, VectorXd& ds_v) {
            const VectorXd base = rcu.cwiseQuotient(su) - du.cwiseProduct(rdu) - rcv.cwiseQuotient(sv) +
                                  dv.cwiseProduct(rdv);
            dy = llt.solve(rp - M * base);
            const VectorXd Atdy = M.transpose() * dy;
            ds_u = rdu - Atdy;
            ds_v = rdv + Atdy;
            dx_u = (rcu - u.cwiseProduct(ds_u)).cwiseQuotient(su);
            dx_v = (rcv - v.cwiseProduct(ds_v)).cwiseQuotient(sv);
        };

        VectorXd au, av, ay, asu, asv;
        newton(-u.cwiseProduct(su), -v.cwiseProduct(sv), au, av, ay, asu, asv);
        const double ap_aff = std::min({1.0, max_step(u, au), max_step(v, av)});
        const double ad_aff = std::min({1.0, max_step(su, asu), max_step(sv, asv)});
        const double mu_aff = ((u + ap_aff * au).dot(su + ad_aff * asu) + (v + ap_aff * av).dot(sv + ad_aff * asv)) / N2;
        const double centering = std::pow(mu_aff / mu, 3);

        VectorXd cu, cv, cy, csu, csv;
        const VectorXd rcu = (centering * mu - (u.cwiseProduct(su) + au.cwiseProduct(asu)).array()).matrix();
        const VectorXd rcv = (centering * mu - (v.cwiseProduct(sv) + av.cwiseProduct(asv)).array()).matrix();
        newton(rcu, rcv, cu, cv, cy, csu, csv);

        const double eta = std::clamp(1.0 - mu, 0.9, 0.999);
        const double ap = std::min(1.0, eta * std::min(max_step(u, cu), max_step(v, cv)));
        const double ad = std::min(1.0, eta * std::min(max_step(su, csu), max_step(sv, csv)));
        u += ap * cu;
        v += ap * cv;
        y += ad * cy;
        su += ad * csu;
        sv += ad * csv;
        res.iterations = it + 1;
        if (!u.allFinite() || !v.allFinite() || !y.allFinite()) break;
    }
    res.x = u - v;
    res.y = y;
    if (res.converged) purify(M, rhs, c, res, opt.tol);
    return res;
}

}  // namespace detail

inline BPSolution weighted_bp(const BPProblem& problem, const BPOptions& opt = {}) {
    using Eigen::Index;
    using Eigen::MatrixXd;
    using Eigen::VectorXd;
    const Index m = problem.A.rows();
    const Index d = problem.A.cols();
    if (problem.b.size() != m) throw std::invalid_argument("weighted_bp: b has wrong length");
    if (problem.w.size() != d) throw std::invalid_argument("weighted_bp: w has wrong length");
    if (!(opt.tol > 0.0)) throw std::invalid_argument("weighted_bp: tolerance must be positive");
    for (Index j = 0; j < d; ++j)
        if (!(problem.w[j] >= 0.0) || !std::isfinite(problem.w[j]))
            throw std::invalid_argument("weighted_bp: weights must be finite and >= 0");

    std::vector<Index> free_idx, pen_idx;
    for (Index j = 0; j < d; ++j) (problem.w[j] == 0.0 ? free_idx : pen_idx).push_back(j);
    const MatrixXd A_free = problem.A(Eigen::all, free_idx);
    const MatrixXd A_pen = problem.A(Eigen::all, pen_idx);

    // Orthonormal basis of range(A_free)^perp.
    MatrixXd N = MatrixXd::Identity(m, m);
    if (!free_idx.empty() && m > 0) {
        Eigen::ColPivHouseholderQR<MatrixXd> qr(A_free);
        const MatrixXd Q = qr.householderQ();
        N = Q.rightCols(m - qr.rank());
    }
    const MatrixXd B = N.transpose() * A_pen;
    const VectorXd c = N.transpose() * problem.b;

    // Orthonormal basis of range(B).
    MatrixXd Q1(B.rows(), 0);
    if (B.rows() > 0 && B.cols() > 0) {
        Eigen::ColPivHouseholderQR<MatrixXd> qr(B);
        const MatrixXd Q = qr.householderQ();
        Q1 = Q.leftCols(qr.rank());
    }

    BPSolution sol;
    const double b_scale = 1.0 + problem.b.norm();
    const double feas_tol = std::max(opt.tol, 1e-10) * b_scale;
    if ((c - Q1 * (Q1.transpose() * c)).norm() > feas_tol) {
        sol.status = BPStatus::Infeasible;
        sol.x_hat = VectorXd::Zero(d);
        sol.dual = VectorXd::Zero(m);
        return sol;
    }

    VectorXd x_pen = VectorXd::Zero(static_cast<Index>(pen_idx.size()));
    VectorXd y_red = VectorXd::Zero(Q1.cols());
    bool converged = true;
    if (Q1.cols() > 0) {
        const MatrixXd M = Q1.transpose() * B;
        const VectorXd rhs = Q1.transpose() * c;
        const VectorXd cost = problem.w(pen_idx);
        const detail::LpResult lp = detail::split_lp(M, rhs, cost, opt);
        x_pen = lp.x;
        y_red = lp.y;
        converged = lp.converged;
        sol.iterations = lp.iterations;
        sol.relative_gap = lp.gap;
    } else {
        sol.relative_gap = 0.0;
    }

    sol.x_hat = VectorXd::Zero(d);
    sol.x_hat(pen_idx) = x_pen;
    if (!free_idx.empty()) {
        const VectorXd rest = problem.b - A_pen * x_pen;
        const VectorXd x_free = A_free.completeOrthogonalDecomposition().solve(rest);
        sol.x_hat(free_idx) = x_free;
    }
    sol.dual = N * (Q1 * y_red);
    sol.primal_residual = (problem.A * sol.x_hat - problem.b).norm();
    sol.objective = problem.w.dot(sol.x_hat.cwiseAbs());
    if (!converged)
        sol.status = BPStatus::NotConverged;
    else
        sol.status = free_idx.empty() ? BPStatus::Optimal : BPStatus::DegenerateWeights;
    return sol;
}

/// ||x_hat - x0||_2 <= threshold (inclusive).
inline bool success(const Eigen::Ref<const Eigen::VectorXd>& x_hat, const Eigen::Ref<const Eigen::VectorXd>& x0,
                    double threshold = 1e-3) {
    if (x_hat.size() != x0.size()) throw std::invalid_argument("success: dimension mismatch");
    return (x_hat - x0).norm() <= threshold;
}

struct KktReport {
    double dual_violation = 0.0;        ///< max_j (|A^T y|_j - w_j)_+
    double complementarity_gap = 0.0;   ///< max over supp(x) of |(A^T y)_j - w_j sgn x_j|
    double primal_residual = 0.0;       ///< ||A x - b||_2
    bool ok = false;
};

/// Checks the optimality certificate carried by a solution. Coordinates with
/// |x_j| > support_tol count as support.
inline KktReport check_kkt(const BPProblem& problem, const BPSolution& sol, double tol = 1e-6,
                           double support_tol = 1e-6) {
    KktReport r;
    const Eigen::VectorXd aty = problem.A.transpose() * sol.dual;
    for (Eigen::Index j = 0; j < aty.size(); ++j) {
        r.dual_violation = std::max(r.dual_violation, std::abs(aty[j]) - problem.w[j]);
        const double xj = sol.x_hat[j];
        if (std::abs(xj) > support_tol) {
            const double target = xj > 0.0 ? problem.w[j] : -problem.w[j];
            r.complementarity_gap = std::max(r.complementarity_gap, std::abs(aty[j] - target));
        }
    }
    r.primal_residual = sol.primal_residual;
    r.ok = r.dual_violation <= tol && r.complementarity_gap <= tol &&
           r.primal_residual <= tol * (1.0 + problem.b.norm());
    return r;
}

}  // namespace wl1
