#pragma once

#include <cmath>
#include <numbers>

#include "pcglasso/core.hpp"

namespace pcglasso {

/// Gaussian log-likelihood (n/2)[log det Theta - tr(S Theta) - p log 2pi].
inline double log_likelihood(const Matrix& theta_hat, const CovMatrix& s) {
    if (theta_hat.rows() != s.p() || theta_hat.cols() != s.p())
        throw InvalidArgument("log_likelihood: dimension mismatch");
    const double p = static_cast<double>(s.p());
    const double tr = (s.s().cwiseProduct(theta_hat)).sum();
    return 0.5 * static_cast<double>(s.n()) *
           (log_det(theta_hat) - tr - p * std::log(2.0 * std::numbers::pi));
}

/// Sum over ordered pairs i != j of |Delta_ij|.
inline double l1_offdiagonal(const Matrix& delta) {
    return delta.cwiseAbs().sum() - delta.diagonal().cwiseAbs().sum();
}

/// tr(S theta^{1/2} Delta theta^{1/2}).
inline double scaled_trace(const Matrix& s, const Matrix& delta, const Vector& root_theta) {
    double tr = 0.0;
    for (Index k = 0; k < s.cols(); ++k)
        for (Index l = 0; l < s.rows(); ++l) tr += s(l, k) * delta(l, k) * root_theta(l) * root_theta(k);
    return tr;
}

/// Penalised objective
///   log det Delta + (1 - 4/n) sum log theta_i - tr(S theta^{1/2} Delta theta^{1/2})
///   - rho sum_{i != j} |Delta_ij|.
inline double pcglasso_objective(const PrecisionDecomposition& d, const CovMatrix& s, double rho) {
    if (d.p() != s.p()) throw InvalidArgument("pcglasso_objective: dimension mismatch");
    if (!(rho >= 0.0)) throw InvalidArgument("pcglasso_objective: rho must be non-negative");
    const Vector root = d.theta().cwiseSqrt();
    return log_det(d.delta()) + s.cn() * d.theta().array().log().sum() -
           scaled_trace(s.s(), d.delta(), root) - rho * l1_offdiagonal(d.delta());
}

/// Coefficients of the three-variable subproblem in (x, y1, y2) = (Delta_ij, sqrt theta_ii,
/// sqrt theta_jj):
///   f = log(a x^2 + b x + c) + 2 cn (log y1 + log y2) - y1^2 - y2^2
///       - 2 c12 x y1 y2 - 2 c1 y1 - 2 c2 y2 - 2 rho |x|.
struct BlockCoefficients {
    std::int64_t n = 0;
    double cn = 0.0;
    double c12 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    DetQuadratic quad;
    double rho = 0.0;

    static BlockCoefficients make(std::int64_t n, double c12, double c1, double c2,
                                  const DetQuadratic& quad, double rho) {
        if (n <= 4) throw InvalidArgument("block coefficients need n > 4 so that 1 - 4/n > 0");
        if (!(rho >= 0.0)) throw InvalidArgument("rho must be non-negative");
        if (!std::isfinite(c12) || !std::isfinite(c1) || !std::isfinite(c2))
            throw InvalidArgument("block coefficients must be finite");
        return {n, 1.0 - 4.0 / static_cast<double>(n), c12, c1, c2, quad, rho};
    }
};

/// Coefficients for the (i, j) block at the current estimate; S must have unit diagonal.
inline BlockCoefficients block_coefficients(const PrecisionDecomposition& d, const CovMatrix& s,
                                            Index i, Index j, double rho) {
    if (d.p() != s.p()) throw InvalidArgument("block_coefficients: dimension mismatch");
    if (!(i < j) || i < 0 || j >= d.p()) throw InvalidArgument("block_coefficients: need i < j");
    if (!s.has_unit_diagonal()) throw InvalidArgument("block_coefficients: S must have unit diagonal");
    double c1 = 0.0;
    double c2 = 0.0;
    for (Index k = 0; k < d.p(); ++k) {
        if (k == i || k == j) continue;
        const double yk = std::sqrt(d.theta()(k));
        c1 += s(i, k) * d.delta()(i, k) * yk;
        c2 += s(j, k) * d.delta()(j, k) * yk;
    }
    return BlockCoefficients::make(s.n(), s(i, j), c1, c2, det_quadratic(d, i, j), rho);
}

/// f(x, y1, y2); throws when x is outside the region where the determinant is positive.
inline double block_objective(const BlockCoefficients& k, double x, double y1, double y2) {
    const double q = k.quad(x);
    if (!(q > 0.0)) throw InvalidArgument("block_objective: infeasible x");
    if (!(y1 > 0.0) || !(y2 > 0.0)) throw InvalidArgument("block_objective: y must be positive");
    return std::log(q) + 2.0 * k.cn * (std::log(y1) + std::log(y2)) - y1 * y1 - y2 * y2 -
           2.0 * k.c12 * x * y1 * y2 - 2.0 * k.c1 * y1 - 2.0 * k.c2 * y2 - 2.0 * k.rho * std::abs(x);
}

struct BlockGradient {
    double fx;
    double fy1;
    double fy2;
};

/// Partial derivatives of f. fx uses sign(0) = 0, i.e. the smooth part only at x = 0.
inline BlockGradient block_gradient(const BlockCoefficients& k, double x, double y1, double y2) {
    const double q = k.quad(x);
    const double sgn = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
    return {(2.0 * k.quad.a * x + k.quad.b) / q - 2.0 * k.c12 * y1 * y2 - 2.0 * k.rho * sgn,
            2.0 * k.cn / y1 - 2.0 * y1 - 2.0 * k.c12 * x * y2 - 2.0 * k.c1,
            2.0 * k.cn / y2 - 2.0 * y2 - 2.0 * k.c12 * x * y1 - 2.0 * k.c2};
}

}  // namespace pcglasso
