#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>

#include "pcglasso/objective.hpp"

namespace pcglasso {

struct Confusion {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
};

struct MetricsRecord {
    double kl = 0.0;
    double fnorm = 0.0;
    double mcc = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
    Confusion counts;
};

/// KL(Theta, Theta_hat) = -log det Theta_hat + tr(Theta_hat Theta^{-1}) + log det Theta - p.
inline double kl_loss(const Matrix& truth, const Matrix& est) {
    if (truth.rows() != est.rows() || truth.cols() != est.cols())
        throw InvalidArgument("kl_loss: dimension mismatch");
    const double p = static_cast<double>(truth.rows());
    const double tr = est.cwiseProduct(spd_inverse(truth)).sum();
    return -log_det(est) + tr + log_det(truth) - p;
}

inline double frobenius(const Matrix& truth, const Matrix& est) {
    if (truth.rows() != est.rows() || truth.cols() != est.cols())
        throw InvalidArgument("frobenius: dimension mismatch");
    return (truth - est).norm();
}

/// Edge confusion counts over pairs i < j, using exact zeros on both sides.
inline Confusion confusion(const Matrix& truth, const PrecisionDecomposition& est) {
    if (truth.rows() != est.p()) throw InvalidArgument("confusion: dimension mismatch");
    Confusion c;
    for (Index i = 0; i < truth.rows(); ++i)
        for (Index j = i + 1; j < truth.cols(); ++j) {
            const bool t = truth(i, j) != 0.0;
            const bool e = est.delta()(i, j) != 0.0;
            if (t && e) ++c.tp;
            else if (!t && !e) ++c.tn;
            else if (!t && e) ++c.fp;
            else ++c.fn;
        }
    return c;
}

/// Matthews correlation coefficient; 0 when any factor of the denominator vanishes.
inline double mcc(std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn) {
    const double a = static_cast<double>(tp), b = static_cast<double>(tn);
    const double c = static_cast<double>(fp), d = static_cast<double>(fn);
    const double den = (a + c) * (a + d) * (b + c) * (b + d);
    if (den == 0.0) return 0.0;
    return (a * b - c * d) / std::sqrt(den);
}

inline double mcc(const Confusion& c) { return mcc(c.tp, c.tn, c.fp, c.fn); }

inline double sensitivity(const Confusion& c) {
    const std::size_t den = c.tp + c.fn;
    return den == 0 ? std::numeric_limits<double>::quiet_NaN()
                    : static_cast<double>(c.tp) / static_cast<double>(den);
}

inline double specificity(const Confusion& c) {
    const std::size_t den = c.tn + c.fp;
    return den == 0 ? std::numeric_limits<double>::quiet_NaN()
                    : static_cast<double>(c.tn) / static_cast<double>(den);
}

inline MetricsRecord evaluate(const Matrix& truth, const PrecisionDecomposition& est) {
    const Matrix theta_hat = recompose(est);
    MetricsRecord m;
    m.kl = kl_loss(truth, theta_hat);
    m.fnorm = frobenius(truth, theta_hat);
    m.counts = confusion(truth, est);
    m.mcc = mcc(m.counts);
    m.sensitivity = sensitivity(m.counts);
    m.specificity = specificity(m.counts);
    return m;
}

/// Column means of a data matrix (rows are observations).
inline Vector column_means(const Matrix& data) { return data.colwise().mean().transpose(); }

/// Gaussian log-likelihood of held-out rows: S is replaced by their second-moment matrix
/// about `center` (normally the training mean) and n by the number of rows.
inline double holdout_loglik(const PrecisionDecomposition& est, const Matrix& test_data, const Vector& center) {
    if (test_data.cols() != est.p() || center.size() != est.p())
        throw InvalidArgument("holdout_loglik: dimension mismatch");
    if (test_data.rows() < 1) throw InvalidArgument("holdout_loglik: no test rows");
    const Matrix centered = test_data.rowwise() - center.transpose();
    const double k = static_cast<double>(test_data.rows());
    const Matrix s = centered.transpose() * centered / k;
    const Matrix theta = recompose(est);
    const double p = static_cast<double>(est.p());
    return 0.5 * k * (log_det(theta) - s.cwiseProduct(theta).sum() - p * std::log(2.0 * std::numbers::pi));
}

}  // namespace pcglasso
