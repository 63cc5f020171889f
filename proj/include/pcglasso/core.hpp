#pragma once

// Matrix types and the theta/Delta parameterisation of a precision matrix.
//
// A precision matrix is stored as Theta = diag(theta)^{1/2} Delta diag(theta)^{1/2}
// where Delta has unit diagonal and holds the negated partial correlations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "pcglasso/errors.hpp"

namespace pcglasso {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kPivotRelTol = 1e-12;
inline constexpr double kIntervalMargin = 1e-9;

/// Lower Cholesky factor of a symmetric matrix. A pivot is accepted only when
/// it exceeds kPivotRelTol times the largest diagonal entry.
inline Matrix cholesky_lower(const Matrix& m) {
    if (m.rows() != m.cols()) throw InvalidArgument("cholesky: matrix is not square");
    const Index p = m.rows();
    const double scale = p > 0 ? m.diagonal().cwiseAbs().maxCoeff() : 0.0;
    const double floor = kPivotRelTol * scale;
    Matrix l = Matrix::Zero(p, p);
    for (Index j = 0; j < p; ++j) {
        double d = m(j, j);
        for (Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > floor)) throw NotPositiveDefinite(static_cast<std::size_t>(j), d);
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (Index i = j + 1; i < p; ++i) {
            double s = m(i, j);
            for (Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

inline bool is_positive_definite(const Matrix& m) {
    try {
        (void)cholesky_lower(m);
        return true;
    } catch (const NotPositiveDefinite&) {
        return false;
    }
}

/// log det of a symmetric positive-definite matrix, via Cholesky.
inline double log_det(const Matrix& m) {
    const Matrix l = cholesky_lower(m);
    double s = 0.0;
    for (Index i = 0; i < l.rows(); ++i) s += 2.0 * std::log(l(i, i));
    return s;
}

/// Inverse of a symmetric positive-definite matrix, symmetrised.
inline Matrix spd_inverse(const Matrix& m) {
    const Matrix l = cholesky_lower(m);
    const Index p = m.rows();
    Matrix inv = Matrix::Identity(p, p);
    l.triangularView<Eigen::Lower>().solveInPlace(inv);
    l.transpose().triangularView<Eigen::Upper>().solveInPlace(inv);
    return 0.5 * (inv + inv.transpose());
}

inline bool is_symmetric(const Matrix& m, double tol = kSymmetryTol) {
    if (m.rows() != m.cols()) return false;
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = i + 1; j < m.cols(); ++j)
            if (!(std::abs(m(i, j) - m(j, i)) <= tol)) return false;
    return true;
}

/// Symmetric sample covariance S together with the sample size n it came from.
class CovMatrix {
public:
    CovMatrix(Matrix s, std::int64_t n) : s_(std::move(s)), n_(n) {
        if (s_.rows() == 0 || s_.rows() != s_.cols())
            throw InvalidArgument("covariance must be a non-empty square matrix");
        if (n_ < 2) throw InvalidArgument("sample size must be at least 2");
        if (!s_.allFinite()) throw InvalidArgument("covariance has non-finite entries");
        if (!is_symmetric(s_)) throw InvalidArgument("covariance is not symmetric");
        for (Index i = 0; i < s_.rows(); ++i)
            if (!(s_(i, i) > 0.0))
                throw InvalidArgument("covariance diagonal entry " + std::to_string(i) +
                                      " is not positive");
    }

    Index p() const noexcept { return s_.rows(); }
    std::int64_t n() const noexcept { return n_; }
    const Matrix& s() const noexcept { return s_; }
    double operator()(Index i, Index j) const { return s_(i, j); }

    /// Coefficient 1 - 4/n of the log-diagonal term.
    double cn() const noexcept { return 1.0 - 4.0 / static_cast<double>(n_); }

    bool has_unit_diagonal(double tol = kSymmetryTol) const {
        for (Index i = 0; i < p(); ++i)
            if (std::abs(s_(i, i) - 1.0) > tol) return false;
        return true;
    }

private:
    Matrix s_;
    std::int64_t n_;
};

/// theta (diagonal of Theta) and Delta (unit-diagonal partial-correlation matrix).
class PrecisionDecomposition {
public:
    /// Validates every invariant, including positive definiteness of delta.
    PrecisionDecomposition(Vector theta, Matrix delta)
        : PrecisionDecomposition(std::move(theta), std::move(delta), Unchecked{}) {
        validate();
    }

    struct Unchecked {};
    PrecisionDecomposition(Vector theta, Matrix delta, Unchecked)
        : theta_(std::move(theta)), delta_(std::move(delta)) {}

    Index p() const noexcept { return theta_.size(); }
    const Vector& theta() const noexcept { return theta_; }
    const Matrix& delta() const noexcept { return delta_; }

    void validate() const {
        const Index p = theta_.size();
        if (p == 0) throw InvalidArgument("empty decomposition");
        if (delta_.rows() != p || delta_.cols() != p)
            throw InvalidArgument("theta and delta dimensions disagree");
        for (Index i = 0; i < p; ++i) {
            if (!(theta_(i) > 0.0) || !std::isfinite(theta_(i)))
                throw InvalidArgument("theta entry " + std::to_string(i) + " is not positive");
            if (delta_(i, i) != 1.0)
                throw InvalidArgument("delta diagonal entry " + std::to_string(i) + " is not 1");
            for (Index j = i + 1; j < p; ++j) {
                if (delta_(i, j) != delta_(j, i)) throw InvalidArgument("delta is not symmetric");
                if (!(std::abs(delta_(i, j)) < 1.0))
                    throw InvalidArgument("partial correlation outside (-1, 1)");
            }
        }
        (void)cholesky_lower(delta_);
    }

    /// Number of nonzero off-diagonal entries (i < j). Zeros are exact.
    std::size_t edge_count() const {
        std::size_t k = 0;
        for (Index i = 0; i < p(); ++i)
            for (Index j = i + 1; j < p(); ++j)
                if (delta_(i, j) != 0.0) ++k;
        return k;
    }

private:
    Vector theta_;
    Matrix delta_;
};

/// theta_i = Theta_ii, Delta_ij = Theta_ij / sqrt(Theta_ii Theta_jj).
inline PrecisionDecomposition decompose(const Matrix& theta_matrix) {
    if (theta_matrix.rows() != theta_matrix.cols() || theta_matrix.rows() == 0)
        throw InvalidArgument("decompose: matrix must be non-empty and square");
    if (!is_symmetric(theta_matrix)) throw InvalidArgument("decompose: matrix is not symmetric");
    (void)cholesky_lower(theta_matrix);
    const Index p = theta_matrix.rows();
    Vector theta = theta_matrix.diagonal();
    Vector root = theta.cwiseSqrt();
    Matrix delta = Matrix::Identity(p, p);
    for (Index i = 0; i < p; ++i)
        for (Index j = i + 1; j < p; ++j) {
            const double v = 0.5 * (theta_matrix(i, j) + theta_matrix(j, i)) / (root(i) * root(j));
            delta(i, j) = v;
            delta(j, i) = v;
        }
    return PrecisionDecomposition(std::move(theta), std::move(delta));
}

inline Matrix recompose(const PrecisionDecomposition& d) {
    const Vector root = d.theta().cwiseSqrt();
    const Index p = d.p();
    Matrix out(p, p);
    for (Index i = 0; i < p; ++i) {
        out(i, i) = d.theta()(i);
        for (Index j = i + 1; j < p; ++j) {
            const double v = d.delta()(i, j) * root(i) * root(j);
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

struct Standardized {
    CovMatrix cov;  ///< unit-diagonal correlation matrix
    Vector scale;   ///< d_i = sqrt(S_ii)
};

/// R = diag(S)^{-1/2} S diag(S)^{-1/2}. The diagonal of R is set to exactly 1.
inline Standardized standardize(const CovMatrix& s) {
    const Index p = s.p();
    Vector d = s.s().diagonal().cwiseSqrt();
    Matrix r(p, p);
    for (Index i = 0; i < p; ++i) {
        r(i, i) = 1.0;
        for (Index j = i + 1; j < p; ++j) {
            const double v = s(i, j) / (d(i) * d(j));
            r(i, j) = v;
            r(j, i) = v;
        }
    }
    return {CovMatrix(std::move(r), s.n()), std::move(d)};
}

/// Maps a precision estimate for the standardised problem back to the original scale:
/// Theta = diag(d)^{-1} Theta_tilde diag(d)^{-1}. Delta is unchanged.
inline PrecisionDecomposition unstandardize(const PrecisionDecomposition& est, const Vector& scale) {
    Vector theta = est.theta().cwiseQuotient(scale.cwiseProduct(scale));
    return PrecisionDecomposition(std::move(theta), est.delta(), PrecisionDecomposition::Unchecked{});
}

/// det(Delta(x)) = a x^2 + b x + c, with (l, u) the part of (-1, 1) where it is positive,
/// shrunk by kIntervalMargin at each end.
struct DetQuadratic {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double l = -1.0;
    double u = 1.0;

    double operator()(double x) const noexcept { return (a * x + b) * x + c; }
    bool contains(double x) const noexcept { return x > l && x < u; }
    bool zero_feasible() const noexcept { return l < 0.0 && u > 0.0; }
};

/// Builds the quadratic together with its feasible interval.
inline DetQuadratic make_det_quadratic(double a, double b, double c) {
    DetQuadratic q{a, b, c, -1.0, 1.0};
    double lo = -1.0;
    double hi = 1.0;
    if (a < 0.0) {
        const double disc = b * b - 4.0 * a * c;
        if (!(disc > 0.0)) throw NumericalError("determinant quadratic is never positive");
        const double sq = std::sqrt(disc);
        // numerically stable pair of roots
        const double t = -0.5 * (b + std::copysign(sq, b));
        double r1 = t / a;
        double r2 = t != 0.0 ? c / t : -r1;
        if (r1 > r2) std::swap(r1, r2);
        lo = std::max(lo, r1);
        hi = std::min(hi, r2);
    } else if (a == 0.0) {
        if (b > 0.0) lo = std::max(lo, -c / b);
        else if (b < 0.0) hi = std::min(hi, -c / b);
        else if (!(c > 0.0)) throw NumericalError("determinant quadratic is never positive");
    } else {
        throw NumericalError("determinant quadratic opens upwards; delta is not positive definite");
    }
    q.l = lo + kIntervalMargin;
    q.u = hi - kIntervalMargin;
    if (!(q.l < q.u)) throw NumericalError("feasible interval for the partial correlation is empty");
    return q;
}

namespace detail {
inline double lu_det(const Matrix& m) { return m.partialPivLu().determinant(); }
}  // namespace detail

/// Determinant of Delta as a quadratic in the (i, j) entry, fitted from three
/// determinant evaluations at x in {0, +h, -h} and checked at the current value.
inline DetQuadratic det_quadratic(const PrecisionDecomposition& d, Index i, Index j) {
    if (!(i < j) || i < 0 || j >= d.p()) throw InvalidArgument("det_quadratic: need 0 <= i < j < p");
    constexpr double h = 0.5;
    Matrix m = d.delta();
    const double x0 = m(i, j);
    auto det_at = [&](double x) {
        m(i, j) = x;
        m(j, i) = x;
        return detail::lu_det(m);
    };
    const double d0 = det_at(0.0);
    const double dp = det_at(h);
    const double dm = det_at(-h);
    const double c = d0;
    const double b = (dp - dm) / (2.0 * h);
    const double a = (dp + dm - 2.0 * d0) / (2.0 * h * h);
    const double scale = std::max({std::abs(d0), std::abs(dp), std::abs(dm)});
    if (!(std::abs(a) > 1e-13 * scale)) throw NumericalError("det_quadratic: degenerate fit");
    const double probe = x0 != 0.0 && std::abs(x0) != h ? x0 : 0.25;
    const double check = det_at(probe);
    if (std::abs(check - ((a * probe + b) * probe + c)) > 1e-9 * std::max(scale, std::abs(check)))
        throw NumericalError("det_quadratic: fit does not reproduce the determinant");
    return make_det_quadratic(a, b, c);
}

/// The same quadratic from W = Delta^{-1} via the rank-two determinant lemma,
/// normalised so that its value at the current entry x0 equals det0.
inline DetQuadratic det_quadratic_from_inverse(const Matrix& w, Index i, Index j, double x0,
                                               double det0 = 1.0) {
    const double wij = w(i, j);
    const double curv = wij * wij - w(i, i) * w(j, j);
    // ratio(t) = 1 + 2 t w_ij + t^2 curv, t = x - x0
    const double a = curv;
    const double b = 2.0 * wij - 2.0 * curv * x0;
    const double c = curv * x0 * x0 - 2.0 * wij * x0 + 1.0;
    return make_det_quadratic(det0 * a, det0 * b, det0 * c);
}

}  // namespace pcglasso
