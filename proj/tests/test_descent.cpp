#include <gtest/gtest.h>

#include <cmath>

#include "oracle.hpp"
#include "pcglasso/descent.hpp"
#include "pcglasso/simgen.hpp"

using namespace pcglasso;

namespace {

CovMatrix random_cov(Index p, std::int64_t n, Rng& rng) {
    Matrix a(p + 4, p);
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < p; ++j) a(i, j) = rng.normal() * (1.0 + j);
    Matrix s = a.transpose() * a / static_cast<double>(a.rows());
    return CovMatrix(0.5 * (s + s.transpose()), n);
}

CovMatrix exchangeable_example() {
    Matrix s(4, 4);
    s << 4, 2, 1, 2, 2, 2, 0.5, 1, 1, 0.5, 0.5, 0.5, 2, 1, 0.5, 2;
    return CovMatrix(s, 100);
}

}  // namespace

TEST(DescentConfig, Validation) {
    DescentConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.epsilon = 0.0;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.max_sweeps = 0;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(CoordinateDescent, POne) {
    const CovMatrix s(Matrix::Identity(1, 1), 20);
    const auto r = coordinate_descent(s, 0.3, initial_estimate(s));
    EXPECT_NEAR(r.estimate.theta()(0), 0.8, 1e-15);
    EXPECT_EQ(r.sweeps, 0);
    EXPECT_TRUE(r.converged);
}

TEST(CoordinateDescent, TwoByTwoMatchesInverse) {
    Matrix s(2, 2);
    s << 1, 0.5, 0.5, 1;
    const CovMatrix cov(s, 1000000);
    const auto r = coordinate_descent(cov, 0.0, decompose(Matrix::Identity(2, 2)));
    const auto ref = decompose(spd_inverse(s));
    EXPECT_NEAR(r.estimate.delta()(0, 1), ref.delta()(0, 1), 1e-4);
    EXPECT_NEAR(r.estimate.delta()(0, 1), -0.5, 1e-4);
    EXPECT_NEAR(r.estimate.theta()(0), ref.theta()(0), 1e-4);
    EXPECT_TRUE(r.converged);
}

TEST(CoordinateDescent, Preconditions) {
    const CovMatrix unit(Matrix::Identity(3, 3), 20);
    const auto start = decompose(Matrix::Identity(3, 3));
    EXPECT_THROW(coordinate_descent(CovMatrix(2.0 * Matrix::Identity(3, 3), 20), 0.1, start), InvalidArgument);
    EXPECT_THROW(coordinate_descent(unit, -0.1, start), InvalidArgument);
    EXPECT_THROW(coordinate_descent(unit, 0.1, decompose(Matrix::Identity(2, 2))), InvalidArgument);
    EXPECT_THROW(coordinate_descent(CovMatrix(Matrix::Identity(3, 3), 4), 0.1, start), InvalidArgument);
}

TEST(CoordinateDescent, NonConvergenceIsReported) {
    Rng rng(1);
    const auto st = standardize(random_cov(6, 30, rng));
    DescentConfig cfg;
    cfg.max_sweeps = 1;
    cfg.epsilon = 1e-300;
    const auto r = coordinate_descent(st.cov, 0.0, decompose(Matrix::Identity(6, 6)), cfg);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.sweeps, 1);
    EXPECT_EQ(r.objective_trace.size(), 2u);
}

TEST(CoordinateDescent, MonotoneAndExactZeros) {
    Rng rng(2);
    for (int rep = 0; rep < 10; ++rep) {
        const auto st = standardize(random_cov(5 + rep % 4, 40, rng));
        for (double rho : {0.0, 0.05, 0.2}) {
            const auto r = coordinate_descent(st.cov, rho, initial_estimate(st.cov));
            EXPECT_TRUE(r.monotone());
            EXPECT_TRUE(r.converged);
            EXPECT_GE(r.min_block_gain, -kTieTol);
            EXPECT_EQ(r.rejected_updates, 0);
            EXPECT_NEAR(r.objective(), pcglasso_objective(r.estimate, st.cov, rho), 1e-9);
        }
    }
}

TEST(CoordinateDescent, MatchesDenseOracle) {
    Rng rng(3);
    DescentConfig cfg;
    cfg.epsilon = 1e-13;
    for (int rep = 0; rep < 6; ++rep) {
        const Index p = rep < 4 ? 2 : 3;
        const auto st = standardize(random_cov(p, 10 + rng.below(90), rng));
        for (double rho : {0.0, 0.1, 0.4}) {
            const auto r = coordinate_descent(st.cov, rho, initial_estimate(st.cov, cfg), cfg);
            EXPECT_NEAR(pcglasso_objective(r.estimate, st.cov, rho), oracle::dense_maximize(st.cov, rho), 1e-6);
        }
    }
}

TEST(CoordinateDescent, Deterministic) {
    Rng rng(4);
    const auto st = standardize(random_cov(7, 30, rng));
    const auto a = coordinate_descent(st.cov, 0.1, initial_estimate(st.cov));
    const auto b = coordinate_descent(st.cov, 0.1, initial_estimate(st.cov));
    EXPECT_EQ(a.estimate.delta(), b.estimate.delta());
    EXPECT_EQ(a.estimate.theta(), b.estimate.theta());
}

TEST(CoordinateDescent, ExchangeableExample) {
    const CovMatrix s = exchangeable_example();
    DescentConfig cfg;
    cfg.epsilon = 1e-15;
    const auto grid = default_rho_grid(s, 20);
    const auto path = regularization_path(s, grid.values, cfg);
    for (std::size_t k = 0; k < path.size(); ++k) {
        const Matrix& d = path.estimates[k].delta();
        EXPECT_LT(std::abs(d(0, 1) - d(0, 2)), 1e-6) << "rho " << path.rhos[k];
        EXPECT_LT(std::abs(d(0, 1) - d(0, 3)), 1e-6) << "rho " << path.rhos[k];
    }
    EXPECT_TRUE(path.all_monotone());
}

TEST(InitialEstimate, Cases) {
    const auto id = initial_estimate(CovMatrix(Matrix::Identity(3, 3), 10));
    EXPECT_TRUE(id.delta().isIdentity());
    EXPECT_TRUE(id.theta().isOnes());

    Rng rng(5);
    const CovMatrix s = random_cov(4, 50, rng);
    const auto e = initial_estimate(s);
    EXPECT_LT((recompose(e) - spd_inverse(s.s())).cwiseAbs().maxCoeff(), 1e-10 * spd_inverse(s.s()).norm());

    Matrix x(3, 6);
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 6; ++j) x(i, j) = rng.normal();
    const CovMatrix singular(sample_covariance(x), 3);
    const auto r = initial_estimate(singular);
    EXPECT_EQ(r.p(), 6);
    EXPECT_NO_THROW(r.validate());
}

TEST(RhoGrid, Shape) {
    Matrix s(3, 3);
    s << 1, 0.4, -0.6, 0.4, 1, 0.1, -0.6, 0.1, 1;
    const CovMatrix cov(s, 10);
    const auto two = default_rho_grid(cov, 2);
    ASSERT_EQ(two.values.size(), 2u);
    EXPECT_EQ(two.values[0], 0.0);
    EXPECT_DOUBLE_EQ(two.values[1], 0.6);
    const auto g = default_rho_grid(cov, 50);
    ASSERT_EQ(g.values.size(), 50u);
    EXPECT_NEAR(g.values[1], 0.006, 1e-15);
    EXPECT_EQ(g.values.back(), 0.6);
    for (std::size_t k = 1; k < g.values.size(); ++k) EXPECT_GT(g.values[k], g.values[k - 1]);
    EXPECT_FALSE(g.degenerate);
    EXPECT_TRUE(default_rho_grid(CovMatrix(Matrix::Identity(3, 3), 10), 5).degenerate);
    EXPECT_THROW(default_rho_grid(cov, 1), InvalidArgument);
    EXPECT_THROW(default_rho_grid(cov, 5, 1.0), InvalidArgument);
}

TEST(RegularizationPath, Preconditions) {
    const CovMatrix s(Matrix::Identity(3, 3), 10);
    const std::vector<double> no_zero{0.1, 0.2};
    const std::vector<double> unsorted{0.0, 0.2, 0.1};
    EXPECT_THROW(regularization_path(s, no_zero), InvalidArgument);
    EXPECT_THROW(regularization_path(s, unsorted), InvalidArgument);
}

TEST(RegularizationPath, LargestRhoGivesEmptyGraph) {
    Rng rng(6);
    for (int rep = 0; rep < 5; ++rep) {
        const CovMatrix s = random_cov(5, 50, rng);
        const auto grid = default_rho_grid(s, 10);
        const auto path = regularization_path(s, grid.values);
        EXPECT_EQ(path.nonzero_counts.back(), 0u);
        EXPECT_TRUE(path.estimates.back().delta().isIdentity());
        EXPECT_TRUE(path.all_monotone());
        EXPECT_TRUE(path.all_converged());
        EXPECT_EQ(path.size(), 10u);
    }
}

TEST(RegularizationPath, RhoZeroMatchesDenseOracle) {
    Rng rng(7);
    const CovMatrix s = random_cov(3, 200, rng);
    DescentConfig cfg;
    cfg.epsilon = 1e-13;
    const std::vector<double> rhos{0.0};
    const auto path = regularization_path(s, rhos, cfg);
    const auto st = standardize(s);
    // the objective at the back-transformed estimate equals the standardised optimum up to
    // the constant sum of log(S_ii) terms; compare on the standardised problem
    EXPECT_NEAR(path.objectives[0], oracle::dense_maximize(st.cov, 0.0), 1e-6);
}

TEST(RegularizationPath, ScaleInvariance) {
    Rng rng(8);
    DescentConfig cfg;
    cfg.epsilon = 1e-12;
    for (int rep = 0; rep < 4; ++rep) {
        const Index p = 4 + rep;
        const CovMatrix s = random_cov(p, 60, rng);
        Vector d(p);
        for (Index i = 0; i < p; ++i) d(i) = (rng.uniform() < 0.5 ? -1.0 : 1.0) * std::exp(rng.uniform(-2.0, 2.0));
        const CovMatrix ds(d.asDiagonal() * s.s() * d.asDiagonal(), s.n());
        const auto grid = default_rho_grid(s, 12);
        const auto a = regularization_path(s, grid.values, cfg);
        const auto b = regularization_path(ds, grid.values, cfg);
        const Vector dinv = d.cwiseInverse();
        for (std::size_t k = 0; k < a.size(); ++k) {
            const Matrix ta = dinv.asDiagonal() * recompose(a.estimates[k]) * dinv.asDiagonal();
            const Matrix tb = recompose(b.estimates[k]);
            for (Index i = 0; i < p; ++i)
                for (Index j = 0; j < p; ++j) {
                    EXPECT_LE(std::abs(ta(i, j) - tb(i, j)), 1e-6 * std::sqrt(std::abs(tb(i, i) * tb(j, j))));
                    EXPECT_EQ(ta(i, j) == 0.0, tb(i, j) == 0.0);
                }
        }
    }
}

TEST(RegularizationPath, RidgeStartWhenNBelowP) {
    Rng rng(9);
    const Matrix truth = make_truth({ScenarioKind::star, 12, 0});
    const Matrix x = sample_gaussian(truth, 8, 3);
    const CovMatrix s = sample_cov(x);
    const auto grid = default_rho_grid(s, 6);
    const auto path = regularization_path(s, grid.values);
    EXPECT_EQ(path.size(), 6u);
    EXPECT_TRUE(path.all_monotone());
}
