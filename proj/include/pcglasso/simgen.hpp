#pragma once

// Simulation scenarios (star, hub, AR(2), random graph) and Gaussian sampling.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcglasso/core.hpp"
#include "pcglasso/rng.hpp"

namespace pcglasso {

enum class ScenarioKind { star, hub, ar2, random };

inline std::string_view to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::star: return "star";
        case ScenarioKind::hub: return "hub";
        case ScenarioKind::ar2: return "ar2";
        case ScenarioKind::random: return "random";
    }
    return "?";
}

inline ScenarioKind parse_scenario(std::string_view s) {
    if (s == "star") return ScenarioKind::star;
    if (s == "hub") return ScenarioKind::hub;
    if (s == "ar2") return ScenarioKind::ar2;
    if (s == "random") return ScenarioKind::random;
    throw InvalidArgument("unknown scenario '" + std::string(s) + "'");
}

struct Scenario {
    ScenarioKind kind = ScenarioKind::star;
    Index p = 20;
    std::uint64_t seed = 0;  ///< only used by the random graph

    /// Number of edges drawn for the random graph, floor(3p/2).
    Index edge_count() const { return 3 * p / 2; }
};

/// Unit-diagonal precision matrix of the scenario, with exact zeros off the support.
inline Matrix make_truth(const Scenario& sc) {
    const Index p = sc.p;
    if (p < 4) throw InvalidArgument("scenarios need p >= 4");
    Matrix t = Matrix::Identity(p, p);
    const double rp = std::sqrt(static_cast<double>(p));
    switch (sc.kind) {
        case ScenarioKind::star:
            for (Index j = 1; j < p; ++j) t(0, j) = t(j, 0) = -1.0 / rp;
            break;
        case ScenarioKind::hub: {
            if (p % 4 != 0) throw InvalidArgument("hub scenario needs p divisible by 4");
            const Index g = p / 4;
            for (Index h = 0; h < p; h += g)
                for (Index j = h + 1; j < h + g; ++j) t(h, j) = t(j, h) = -2.0 / rp;
            break;
        }
        case ScenarioKind::ar2:
            for (Index i = 0; i < p; ++i) {
                if (i + 1 < p) t(i, i + 1) = t(i + 1, i) = 0.5;
                if (i + 2 < p) t(i, i + 2) = t(i + 2, i) = 0.25;
            }
            break;
        case ScenarioKind::random: {
            Rng rng(sc.seed);
            std::vector<std::pair<Index, Index>> pairs;
            for (Index i = 0; i < p; ++i)
                for (Index j = i + 1; j < p; ++j) pairs.emplace_back(i, j);
            // The rescaled matrix is not positive definite for every draw; redraw until it is.
            for (;;) {
                rng.shuffle(std::span(pairs));
                Matrix a = Matrix::Zero(p, p);
                for (Index e = 0; e < sc.edge_count(); ++e) {
                    const double mag = rng.uniform(0.4, 1.0);
                    const double v = rng.uniform() < 0.5 ? -mag : mag;
                    a(pairs[e].first, pairs[e].second) = v;
                    a(pairs[e].second, pairs[e].first) = v;
                }
                const Vector colsum = a.cwiseAbs().colwise().sum().transpose();
                for (Index j = 0; j < p; ++j)
                    if (colsum(j) > 0.0) a.col(j) /= 1.1 * colsum(j);
                Matrix m = 0.5 * (a + a.transpose());
                m.diagonal().setOnes();
                if (is_positive_definite(m)) return m;
            }
        }
    }
    return t;
}

/// n rows drawn i.i.d. from N(0, truth^{-1}).
inline Matrix sample_gaussian(const Matrix& truth, Index n, std::uint64_t seed) {
    if (n < 2) throw InvalidArgument("sample_gaussian: n must be at least 2");
    const Matrix l = cholesky_lower(spd_inverse(truth));
    const Index p = truth.rows();
    Rng rng(seed);
    Matrix z(n, p);
    for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < p; ++c) z(r, c) = rng.normal();
    return z * l.transpose();
}

/// (1/n) sum (x_t - xbar)(x_t - xbar)^T.
inline Matrix sample_covariance(const Matrix& data) {
    if (data.rows() < 2) throw InvalidArgument("sample covariance needs at least 2 rows");
    const Matrix centered = data.rowwise() - data.colwise().mean();
    Matrix s = centered.transpose() * centered / static_cast<double>(data.rows());
    return 0.5 * (s + s.transpose());
}

/// Sample covariance wrapped with its sample size; zero-variance columns are rejected.
inline CovMatrix sample_cov(const Matrix& data) {
    Matrix s = sample_covariance(data);
    for (Index j = 0; j < s.rows(); ++j)
        if (!(s(j, j) > 0.0)) throw DataError("column " + std::to_string(j + 1) + " has zero variance");
    return CovMatrix(std::move(s), data.rows());
}

}  // namespace pcglasso
