#pragma once

// One-dimensional analysis of a logarithmic diagonal penalty c log(theta): the penalised
// estimate (1 - 2c/n)/s and its exact mean squared error, where (n-1) theta s ~ chi^2_{n-1}
// and s is the unbiased sample variance.

#include <cmath>
#include <cstdint>

#include "pcglasso/errors.hpp"
#include "pcglasso/rng.hpp"

namespace pcglasso {

inline double penalized_estimator(double s, double n, double c) {
    if (!(s > 0.0)) throw InvalidArgument("penalized_estimator: s must be positive");
    if (!(2.0 * c < n)) throw InvalidArgument("penalized_estimator: need 2c < n for a positive estimate");
    return (1.0 - 2.0 * c / n) / s;
}

inline double mse_closed_form(double n, double c, double theta) {
    if (!(n > 5.0)) throw InvalidArgument("mse_closed_form: need n > 5");
    const double k = 1.0 - 2.0 * c / n;
    const double r = (n - 1.0) / (n - 3.0);
    const double var = 2.0 * k * k * (n - 1.0) * (n - 1.0) / ((n - 3.0) * (n - 3.0) * (n - 5.0));
    const double bias = k * r - 1.0;
    return theta * theta * (var + bias * bias);
}

/// Minimiser of mse_closed_form over c.
inline double mse_optimal_c(double n) { return 2.0 * n / (n - 1.0); }

struct MonteCarloMse {
    double mse = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo MSE of the penalised estimator from `reps` samples of size n drawn from
/// N(0, 1/theta), using the unbiased sample variance.
inline MonteCarloMse monte_carlo_mse(int n, double c, double theta, int reps, std::uint64_t seed) {
    if (n < 6 || reps < 2) throw InvalidArgument("monte_carlo_mse: need n > 5 and reps > 1");
    Rng rng(seed);
    const double sd = 1.0 / std::sqrt(theta);
    double sum = 0.0;
    double sum2 = 0.0;
    for (int r = 0; r < reps; ++r) {
        double m = 0.0;
        double m2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = sd * rng.normal();
            const double d = x - m;
            m += d / (i + 1);
            m2 += d * (x - m);
        }
        const double s = m2 / (n - 1);
        const double err = penalized_estimator(s, n, c) - theta;
        sum += err * err;
        sum2 += err * err * err * err;
    }
    const double mean = sum / reps;
    const double var = (sum2 / reps - mean * mean) * reps / (reps - 1.0);
    return {mean, std::sqrt(var / reps)};
}

}  // namespace pcglasso
