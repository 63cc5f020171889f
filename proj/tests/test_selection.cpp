#include <gtest/gtest.h>

#include <cmath>

#include "pcglasso/selection.hpp"
#include "pcglasso/simgen.hpp"

using namespace pcglasso;

namespace {

PrecisionDecomposition with_edges(Index p, int edges) {
    Matrix d = Matrix::Identity(p, p);
    int k = 0;
    for (Index j = 1; j < p && k < edges; ++j, ++k) d(0, j) = d(j, 0) = 0.1;
    return PrecisionDecomposition(Vector::Ones(p), d);
}

}  // namespace

TEST(Bic, PlugIn) {
    const CovMatrix s(Matrix::Identity(3, 3), 100);
    const auto est = with_edges(3, 2);
    const double l = log_likelihood(recompose(est), s);
    EXPECT_NEAR(bic(est, s), std::log(100.0) * 2 - 2 * l, 1e-10);
    EXPECT_NEAR(std::log(100.0) * 2 + 100.0, 109.2103, 1e-4);
    const auto empty = with_edges(3, 0);
    EXPECT_NEAR(bic(empty, s), -2 * log_likelihood(Matrix::Identity(3, 3), s), 1e-10);
}

TEST(Bic, DifferenceIsLinear) {
    const CovMatrix s(Matrix::Identity(4, 4), 50);
    const auto a = with_edges(4, 1);
    const auto b = with_edges(4, 3);
    const double dl = log_likelihood(recompose(b), s) - log_likelihood(recompose(a), s);
    EXPECT_NEAR(bic(b, s) - bic(a, s), std::log(50.0) * 2 - 2 * dl, 1e-10);
}

TEST(Ebic, Formula) {
    const CovMatrix s(Matrix::Identity(10, 10), 100);
    const auto est = with_edges(10, 3);
    EXPECT_EQ(ebic(est, s, 0.0), bic(est, s));
    EXPECT_NEAR(ebic(est, s, 0.5) - bic(est, s), 13.8155, 1e-4);
    EXPECT_LT(ebic(with_edges(10, 2), s, 0.5) - bic(with_edges(10, 2), s),
              ebic(est, s, 0.5) - bic(est, s));
    EXPECT_THROW(ebic(est, s, 1.5), InvalidArgument);
    EXPECT_THROW(ebic(est, s, -0.1), InvalidArgument);
}

TEST(Select, SingleEntryAndTies) {
    std::vector<SelectionScore> one{{0.0, 1.0, 2.0, 0, 0.0}};
    EXPECT_EQ(select(one).by_bic, 0u);
    EXPECT_EQ(select(one).by_ebic, 0u);
    std::vector<SelectionScore> tie{{0.0, 1.0, 1.0, 2, 0.0}, {0.1, 1.0, 1.0, 1, 0.0}, {0.2, 3.0, 3.0, 0, 0.0}};
    EXPECT_EQ(select(tie).by_bic, 1u);
    EXPECT_THROW(select(std::vector<SelectionScore>{}), InvalidArgument);
}

TEST(Select, PicksFittedModelOnStrongDependence) {
    const Matrix truth = make_truth({ScenarioKind::ar2, 6, 0});
    const CovMatrix s = sample_cov(sample_gaussian(truth, 400, 1));
    const auto grid = default_rho_grid(s, 20);
    const auto path = regularization_path(s, grid.values);
    const auto sel = select(path, s, 0.5);
    EXPECT_GT(path.estimates[sel.by_bic].edge_count(), 0u);
    EXPECT_LT(sel.by_bic, path.size() - 1);
    const auto g0 = select(path, s, 0.0);
    EXPECT_EQ(g0.by_bic, g0.by_ebic);
    const auto scores = score_path(path, s, 0.0);
    for (std::size_t k = 0; k < scores.size(); ++k) {
        EXPECT_EQ(scores[k].bic, scores[k].ebic);
        EXPECT_NEAR(scores[k].bic, bic(path.estimates[k], s), 1e-9 * std::abs(scores[k].bic));
    }
}

TEST(Select, InvariantUnderScaling) {
    const Matrix truth = make_truth({ScenarioKind::star, 8, 0});
    const Matrix x = sample_gaussian(truth, 100, 2);
    const CovMatrix s = sample_cov(x);
    Vector d(8);
    d << 1, -2, 0.5, 3, 1, -0.1, 10, 1;
    const CovMatrix ds(d.asDiagonal() * s.s() * d.asDiagonal(), s.n());
    const auto grid = default_rho_grid(s, 15);
    const auto a = select(regularization_path(s, grid.values), s, 0.5);
    const auto b = select(regularization_path(ds, grid.values), ds, 0.5);
    EXPECT_EQ(a.by_bic, b.by_bic);
    EXPECT_EQ(a.by_ebic, b.by_ebic);
}
