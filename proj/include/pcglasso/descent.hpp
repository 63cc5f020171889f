#pragma once

// Blockwise coordinate descent and the warm-started regularisation path.

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "pcglasso/block_solver.hpp"
#include "pcglasso/rng.hpp"

namespace pcglasso {

struct DescentConfig {
    double epsilon = 1e-8;      ///< convergence threshold, scaled by the active proportion q
    int max_sweeps = 500;       ///< per call of coordinate_descent
    double ridge_ratio = 1e-3;  ///< alpha = ridge_ratio * tr(S) / p for the ridge start
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
        if (max_sweeps < 1) throw InvalidArgument("max_sweeps must be at least 1");
        if (!(ridge_ratio > 0.0)) throw InvalidArgument("ridge constant must be positive");
    }
};

struct DescentResult {
    PrecisionDecomposition estimate;
    bool converged = false;
    int sweeps = 0;
    /// Objective before the first sweep and after each sweep.
    std::vector<double> objective_trace;
    /// Smallest change of the block objective over all updates (>= -kTieTol when healthy).
    double min_block_gain = 0.0;
    /// Updates where the block solver returned a worse point than the incumbent; the
    /// incumbent was kept.
    int rejected_updates = 0;

    double objective() const { return objective_trace.back(); }

    bool monotone(double slack = 1e-10) const {
        for (std::size_t k = 1; k < objective_trace.size(); ++k)
            if (objective_trace[k] < objective_trace[k - 1] - slack) return false;
        return true;
    }
};

namespace detail {

struct DescentState {
    Vector theta;
    Vector root;
    Matrix delta;
    Matrix inv;  // delta^{-1}

    double objective(const CovMatrix& s, double rho) const {
        return log_det(delta) + s.cn() * theta.array().log().sum() - scaled_trace(s.s(), delta, root) -
               rho * l1_offdiagonal(delta);
    }

    std::size_t nonzeros() const {
        std::size_t k = 0;
        for (Index i = 0; i < delta.rows(); ++i)
            for (Index j = i + 1; j < delta.cols(); ++j)
                if (delta(i, j) != 0.0) ++k;
        return k;
    }

    /// delta(i,j) += t with inverse kept in sync (rank-two Woodbury update).
    void set_entry(Index i, Index j, double x, double ratio) {
        const double t = x - delta(i, j);
        delta(i, j) = x;
        delta(j, i) = x;
        if (t == 0.0) return;
        const Vector wi = inv.col(i);
        const Vector wj = inv.col(j);
        const double t2 = t * t;
        const double cij = -(t2 * inv(i, j) + t);
        const double cii = t2 * inv(j, j);
        const double cjj = t2 * inv(i, i);
        inv.noalias() += (cii / ratio) * wi * wi.transpose() + (cjj / ratio) * wj * wj.transpose() +
                         (cij / ratio) * (wi * wj.transpose() + wj * wi.transpose());
    }
};

}  // namespace detail

/// Maximises the penalised objective for one rho on a unit-diagonal covariance, starting
/// from `start`. Each sweep visits every pair i < j once in a freshly shuffled order.
inline DescentResult coordinate_descent(const CovMatrix& s, double rho, const PrecisionDecomposition& start,
                                        const DescentConfig& cfg = {}) {
    cfg.validate();
    if (!s.has_unit_diagonal()) throw InvalidArgument("coordinate_descent: S must have unit diagonal");
    if (start.p() != s.p()) throw InvalidArgument("coordinate_descent: dimension mismatch");
    if (!(rho >= 0.0)) throw InvalidArgument("coordinate_descent: rho must be non-negative");
    if (s.n() <= 4) throw InvalidArgument("coordinate_descent: need n > 4");
    const Index p = s.p();

    if (p == 1) {
        Vector theta(1);
        theta(0) = s.cn() / s(0, 0);
        PrecisionDecomposition est(theta, Matrix::Identity(1, 1));
        const double obj = pcglasso_objective(est, s, rho);
        return {std::move(est), true, 0, {obj}, 0.0, 0};
    }

    detail::DescentState st{start.theta(), start.theta().cwiseSqrt(), start.delta(), spd_inverse(start.delta())};
    std::vector<std::pair<Index, Index>> pairs;
    for (Index i = 0; i < p; ++i)
        for (Index j = i + 1; j < p; ++j) pairs.emplace_back(i, j);
    const double npairs = static_cast<double>(pairs.size());

    Rng rng(cfg.rng_seed);
    DescentResult res{start, false, 0, {st.objective(s, rho)}, 0.0, 0};
    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
        const double q = std::max(static_cast<double>(st.nonzeros()) / npairs, 1.0 / npairs);
        const double before = res.objective_trace.back();
        rng.shuffle(std::span(pairs));
        for (const auto& [i, j] : pairs) {
            const double x0 = st.delta(i, j);
            const DetQuadratic quad = det_quadratic_from_inverse(st.inv, i, j, x0);
            double c1 = 0.0;
            double c2 = 0.0;
            for (Index k = 0; k < p; ++k) {
                if (k == i || k == j) continue;
                c1 += s(i, k) * st.delta(i, k) * st.root(k);
                c2 += s(j, k) * st.delta(j, k) * st.root(k);
            }
            const auto coef = BlockCoefficients::make(s.n(), s(i, j), c1, c2, quad, rho);
            const BlockSolution sol = solve_block(coef);
            const double gain = sol.f_value - block_objective(coef, x0, st.root(i), st.root(j));
            res.min_block_gain = std::min(res.min_block_gain, gain);
            if (gain < -kTieTol) {
                ++res.rejected_updates;
                continue;
            }
            st.set_entry(i, j, sol.x, quad(sol.x));
            st.root(i) = sol.y1;
            st.root(j) = sol.y2;
            st.theta(i) = sol.y1 * sol.y1;
            st.theta(j) = sol.y2 * sol.y2;
        }
        st.inv = spd_inverse(st.delta);
        res.objective_trace.push_back(st.objective(s, rho));
        res.sweeps = sweep + 1;
        if (res.objective_trace.back() - before < q * cfg.epsilon) {
            res.converged = true;
            break;
        }
    }
    res.estimate = PrecisionDecomposition(st.theta, st.delta);
    return res;
}

/// Starting point: decompose(S^{-1}) when S is well conditioned and n >= p, otherwise
/// decompose((S + alpha I)^{-1}).
inline PrecisionDecomposition initial_estimate(const CovMatrix& s, const DescentConfig& cfg = {}) {
    const Index p = s.p();
    if (s.n() >= p) {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(s.s(), Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        if (lo > 0.0 && hi / lo < 1e12) {
            try {
                return decompose(spd_inverse(s.s()));
            } catch (const NotPositiveDefinite&) {
            }
        }
    }
    const double alpha = cfg.ridge_ratio * s.s().trace() / static_cast<double>(p);
    return decompose(spd_inverse(s.s() + alpha * Matrix::Identity(p, p)));
}

struct PathResult {
    std::vector<double> rhos;
    std::vector<PrecisionDecomposition> estimates;  ///< original scale
    std::vector<double> objectives;                 ///< on the standardised problem
    std::vector<std::size_t> nonzero_counts;
    std::vector<bool> converged;
    std::vector<int> sweeps;
    std::vector<double> min_block_gain;
    std::vector<int> rejected_updates;
    std::vector<bool> monotone;

    std::size_t size() const noexcept { return rhos.size(); }
    bool all_converged() const {
        for (bool c : converged)
            if (!c) return false;
        return true;
    }
    bool all_monotone() const {
        for (bool m : monotone)
            if (!m) return false;
        return true;
    }
};

/// Standardises S, solves rho = rhos[0] = 0 from the initial estimate and warm-starts every
/// following rho from the previous solution. Estimates are returned on the original scale.
inline PathResult regularization_path(const CovMatrix& s, std::span<const double> rhos,
                                      const DescentConfig& cfg = {}) {
    if (rhos.empty() || rhos[0] != 0.0) throw InvalidArgument("rho grid must start at 0");
    for (std::size_t k = 1; k < rhos.size(); ++k)
        if (!(rhos[k] > rhos[k - 1])) throw InvalidArgument("rho grid must be strictly increasing");
    const Standardized st = standardize(s);
    PrecisionDecomposition current = initial_estimate(st.cov, cfg);
    PathResult out;
    for (double rho : rhos) {
        DescentResult r = coordinate_descent(st.cov, rho, current, cfg);
        current = r.estimate;
        out.rhos.push_back(rho);
        out.estimates.push_back(unstandardize(r.estimate, st.scale));
        out.objectives.push_back(r.objective());
        out.nonzero_counts.push_back(r.estimate.edge_count());
        out.converged.push_back(r.converged);
        out.sweeps.push_back(r.sweeps);
        out.min_block_gain.push_back(r.min_block_gain);
        out.rejected_updates.push_back(r.rejected_updates);
        out.monotone.push_back(r.monotone());
    }
    return out;
}

struct RhoGrid {
    std::vector<double> values;
    bool degenerate = false;  ///< S had no off-diagonal correlation; the grid is arbitrary
};

/// [0] followed by count-1 log-spaced values from min_ratio * rho_max to rho_max, where
/// rho_max is the largest absolute off-diagonal sample correlation.
inline RhoGrid default_rho_grid(const CovMatrix& s, int count, double min_ratio = 0.01) {
    if (count < 2) throw InvalidArgument("rho grid needs at least 2 points");
    if (!(min_ratio > 0.0 && min_ratio < 1.0)) throw InvalidArgument("rho min ratio must be in (0, 1)");
    const Matrix r = standardize(s).cov.s();
    double rho_max = 0.0;
    for (Index i = 0; i < r.rows(); ++i)
        for (Index j = i + 1; j < r.cols(); ++j) rho_max = std::max(rho_max, std::abs(r(i, j)));
    RhoGrid g;
    if (rho_max == 0.0) {
        g.degenerate = true;
        rho_max = 1e-2;
    }
    g.values.push_back(0.0);
    const int m = count - 1;
    if (m == 1) {
        g.values.push_back(rho_max);
        return g;
    }
    const double lo = std::log(min_ratio * rho_max);
    const double hi = std::log(rho_max);
    for (int k = 0; k < m; ++k)
        g.values.push_back(k == m - 1 ? rho_max : std::exp(lo + (hi - lo) * k / (m - 1)));
    return g;
}

}  // namespace pcglasso
