#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pcglasso/objective.hpp"
#include "pcglasso/rng.hpp"

using namespace pcglasso;

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

Matrix random_spd(Index p, Rng& rng) {
    Matrix a(p, p);
    for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p; ++j) a(i, j) = rng.normal();
    return a.transpose() * a + Matrix::Identity(p, p);
}

CovMatrix random_corr(Index p, std::int64_t n, Rng& rng) {
    const Matrix s = random_spd(p, rng);
    const Vector d = s.diagonal().cwiseSqrt().cwiseInverse();
    Matrix r = d.asDiagonal() * s * d.asDiagonal();
    r.diagonal().setOnes();
    return CovMatrix(0.5 * (r + r.transpose()), n);
}

PrecisionDecomposition random_decomposition(Index p, Rng& rng) {
    return decompose(spd_inverse(random_spd(p, rng)));
}

}  // namespace

TEST(LogLikelihood, Scalar) {
    const CovMatrix s(Matrix::Identity(1, 1), 2);
    EXPECT_NEAR(log_likelihood(Matrix::Identity(1, 1), s), -1.0 - kLog2Pi, 1e-14);
    EXPECT_NEAR(-1.0 - kLog2Pi, -2.83788, 1e-5);
}

TEST(LogLikelihood, Diagonal) {
    const CovMatrix s(2.0 * Matrix::Identity(2, 2), 2);
    const Matrix th = 0.5 * Matrix::Identity(2, 2);
    EXPECT_NEAR(log_likelihood(th, s), -std::log(4.0) - 2.0 - 2.0 * kLog2Pi, 1e-14);
}

TEST(LogLikelihood, MatchesDensitySum) {
    Rng rng(7);
    const Index p = 3;
    const int n = 40;
    Matrix x(n, p);
    for (int r = 0; r < n; ++r)
        for (Index c = 0; c < p; ++c) x(r, c) = rng.normal();
    const Matrix s = x.transpose() * x / n;  // known zero mean
    const Matrix th = spd_inverse(random_spd(p, rng));
    double direct = 0.0;
    for (int r = 0; r < n; ++r) {
        const Vector v = x.row(r).transpose();
        direct += 0.5 * (log_det(th) - v.dot(th * v) - p * kLog2Pi);
    }
    EXPECT_NEAR(log_likelihood(th, CovMatrix(s, n)), direct, 1e-10);
}

TEST(LogLikelihood, DimensionMismatch) {
    EXPECT_THROW(log_likelihood(Matrix::Identity(2, 2), CovMatrix(Matrix::Identity(3, 3), 5)), InvalidArgument);
}

TEST(Objective, IdentityCase) {
    const PrecisionDecomposition d(Vector::Ones(4), Matrix::Identity(4, 4));
    EXPECT_DOUBLE_EQ(pcglasso_objective(d, CovMatrix(Matrix::Identity(4, 4), 50), 0.3), -4.0);
}

TEST(Objective, PEqualsOne) {
    Vector th(1);
    th << 2.5;
    Matrix s(1, 1);
    s << 0.7;
    const double cn = 1.0 - 4.0 / 20.0;
    EXPECT_NEAR(pcglasso_objective(PrecisionDecomposition(th, Matrix::Identity(1, 1)), CovMatrix(s, 20), 1.0),
                cn * std::log(2.5) - 0.7 * 2.5, 1e-15);
}

TEST(Objective, TwoByTwoPenaltyCountsBothOrderedPairs) {
    Matrix d = Matrix::Identity(2, 2);
    d(0, 1) = d(1, 0) = 0.5;
    // n huge so that cn is 1 to rounding; theta = 1 makes the log term vanish anyway
    const double v = pcglasso_objective(PrecisionDecomposition(Vector::Ones(2), d),
                                        CovMatrix(Matrix::Identity(2, 2), 1000000000), 0.1);
    EXPECT_NEAR(v, std::log(0.75) - 2.1, 1e-14);
}

TEST(Objective, NonIncreasingInRho) {
    Rng rng(2);
    for (int rep = 0; rep < 20; ++rep) {
        const auto d = random_decomposition(4, rng);
        const CovMatrix s = random_corr(4, 30, rng);
        double prev = pcglasso_objective(d, s, 0.0);
        for (double rho : {0.01, 0.1, 0.5, 2.0}) {
            const double v = pcglasso_objective(d, s, rho);
            EXPECT_LE(v, prev);
            prev = v;
        }
    }
}

TEST(BlockCoefficients, PTwo) {
    Matrix s(2, 2);
    s << 1, 0.3, 0.3, 1;
    const auto k = block_coefficients(PrecisionDecomposition(Vector::Ones(2), Matrix::Identity(2, 2)),
                                      CovMatrix(s, 10), 0, 1, 0.2);
    EXPECT_EQ(k.c1, 0.0);
    EXPECT_EQ(k.c2, 0.0);
    EXPECT_EQ(k.c12, 0.3);
    EXPECT_DOUBLE_EQ(k.cn, 0.6);
    EXPECT_EQ(k.rho, 0.2);
}

TEST(BlockCoefficients, SingleCrossTerm) {
    Matrix d = Matrix::Identity(3, 3);
    d(0, 2) = d(2, 0) = 0.5;
    Vector th(3);
    th << 1, 1, 4;
    Matrix s = Matrix::Identity(3, 3);
    s(0, 2) = s(2, 0) = 0.2;
    const auto k = block_coefficients(PrecisionDecomposition(th, d), CovMatrix(s, 10), 0, 1, 0.0);
    EXPECT_NEAR(k.c1, 0.2, 1e-15);
    EXPECT_EQ(k.c2, 0.0);
}

TEST(BlockCoefficients, Preconditions) {
    const PrecisionDecomposition d(Vector::Ones(2), Matrix::Identity(2, 2));
    EXPECT_THROW(block_coefficients(d, CovMatrix(2.0 * Matrix::Identity(2, 2), 10), 0, 1, 0.0), InvalidArgument);
    EXPECT_THROW(block_coefficients(d, CovMatrix(Matrix::Identity(2, 2), 4), 0, 1, 0.0), InvalidArgument);
    EXPECT_THROW(block_coefficients(d, CovMatrix(Matrix::Identity(2, 2), 10), 0, 1, -1.0), InvalidArgument);
}

TEST(BlockObjective, SimpleValue) {
    const auto k = BlockCoefficients::make(10, 0.4, 0.0, 0.0, make_det_quadratic(-1, 0, 1), 0.7);
    EXPECT_DOUBLE_EQ(block_objective(k, 0.0, 1.0, 1.0), -2.0);
    EXPECT_THROW(block_objective(k, 1.5, 1.0, 1.0), InvalidArgument);
    EXPECT_THROW(block_objective(k, 0.0, 0.0, 1.0), InvalidArgument);
}

TEST(BlockObjective, LinearInRho) {
    auto k = BlockCoefficients::make(10, 0.4, 0.3, -0.2, make_det_quadratic(-1, 0.1, 0.9), 0.25);
    const double x = -0.3;
    const double a = block_objective(k, x, 0.8, 1.3);
    k.rho *= 2.0;
    EXPECT_NEAR(a - block_objective(k, x, 0.8, 1.3), 2.0 * 0.25 * std::abs(x), 1e-14);
}

TEST(BlockObjective, DiffersFromFullObjectiveByConstant) {
    Rng rng(9);
    for (int rep = 0; rep < 20; ++rep) {
        const Index p = 3 + rep % 4;
        const auto d = random_decomposition(p, rng);
        const CovMatrix s = random_corr(p, 25, rng);
        const double rho = rng.uniform(0.0, 0.5);
        const Index i = rng.below(p - 1);
        const Index j = i + 1 + rng.below(p - 1 - i);
        const auto k = block_coefficients(d, s, i, j, rho);
        double offset = 0.0;
        for (int t = 0; t < 10; ++t) {
            const double x = rng.uniform(k.quad.l, k.quad.u);
            const double y1 = rng.uniform(0.2, 2.0);
            const double y2 = rng.uniform(0.2, 2.0);
            Matrix delta = d.delta();
            delta(i, j) = delta(j, i) = x;
            Vector th = d.theta();
            th(i) = y1 * y1;
            th(j) = y2 * y2;
            const double full = pcglasso_objective(PrecisionDecomposition(th, delta), s, rho);
            const double diff = full - block_objective(k, x, y1, y2);
            if (t == 0) offset = diff;
            EXPECT_NEAR(diff, offset, 1e-9);
        }
    }
}

TEST(BlockGradient, MatchesFiniteDifferences) {
    Rng rng(4);
    const double h = 1e-6;
    for (int rep = 0; rep < 500; ++rep) {
        const double r1 = rng.uniform(-1.0, 0.5);
        const double r2 = rng.uniform(r1 + 0.1, 1.0);
        const double a = -rng.uniform(0.2, 2.0);
        const auto q = make_det_quadratic(a, -a * (r1 + r2), a * r1 * r2);
        const auto k = BlockCoefficients::make(5 + rng.below(500), rng.uniform(-0.9, 0.9), rng.normal(),
                                               rng.normal(), q, rng.uniform(0.0, 1.0));
        const double margin = 0.05 * (q.u - q.l);
        double x = rng.uniform(q.l + margin, q.u - margin);
        if (std::abs(x) < 2 * h) x = 3 * h;
        const double y1 = rng.uniform(0.2, 3.0);
        const double y2 = rng.uniform(0.2, 3.0);
        const auto g = block_gradient(k, x, y1, y2);
        const double fx = (block_objective(k, x + h, y1, y2) - block_objective(k, x - h, y1, y2)) / (2 * h);
        const double f1 = (block_objective(k, x, y1 + h, y2) - block_objective(k, x, y1 - h, y2)) / (2 * h);
        const double f2 = (block_objective(k, x, y1, y2 + h) - block_objective(k, x, y1, y2 - h)) / (2 * h);
        EXPECT_LE(std::abs(g.fx - fx), 1e-6 * std::max(1.0, std::abs(fx)));
        EXPECT_LE(std::abs(g.fy1 - f1), 1e-6 * std::max(1.0, std::abs(f1)));
        EXPECT_LE(std::abs(g.fy2 - f2), 1e-6 * std::max(1.0, std::abs(f2)));
    }
}

TEST(Objective, ConcaveInDeltaForFixedTheta) {
    Rng rng(12);
    for (int rep = 0; rep < 200; ++rep) {
        const Index p = 2 + rep % 5;
        const CovMatrix s = random_corr(p, 50, rng);
        const Vector th = random_decomposition(p, rng).theta();
        const auto a = random_decomposition(p, rng);
        const auto b = random_decomposition(p, rng);
        const double lam = rng.uniform();
        const double rho = rng.uniform(0.0, 0.5);
        const Matrix mid = lam * a.delta() + (1.0 - lam) * b.delta();
        const double fm = pcglasso_objective(PrecisionDecomposition(th, mid), s, rho);
        const double fa = pcglasso_objective(PrecisionDecomposition(th, a.delta()), s, rho);
        const double fb = pcglasso_objective(PrecisionDecomposition(th, b.delta()), s, rho);
        EXPECT_GE(fm, lam * fa + (1.0 - lam) * fb - 1e-9);
    }
}
