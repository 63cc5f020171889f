#pragma once

#include <cmath>
#include <vector>

#include "pcglasso/descent.hpp"
#include "pcglasso/objective.hpp"

namespace pcglasso {

struct SelectionScore {
    double rho = 0.0;
    double bic = 0.0;
    double ebic = 0.0;
    std::size_t edges = 0;
    double loglik = 0.0;
};

/// log(n) * #edges - 2 l(Theta | S).
inline double bic(const PrecisionDecomposition& est, const CovMatrix& s) {
    const double edges = static_cast<double>(est.edge_count());
    return std::log(static_cast<double>(s.n())) * edges - 2.0 * log_likelihood(recompose(est), s);
}

/// BIC + 4 gamma log(p) * #edges.
inline double ebic(const PrecisionDecomposition& est, const CovMatrix& s, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("ebic: gamma must be in [0, 1]");
    return bic(est, s) + 4.0 * gamma * std::log(static_cast<double>(s.p())) *
                             static_cast<double>(est.edge_count());
}

inline std::vector<SelectionScore> score_path(const PathResult& path, const CovMatrix& s, double gamma) {
    std::vector<SelectionScore> out;
    out.reserve(path.size());
    for (std::size_t k = 0; k < path.size(); ++k) {
        const auto& est = path.estimates[k];
        SelectionScore sc;
        sc.rho = path.rhos[k];
        sc.edges = est.edge_count();
        sc.loglik = log_likelihood(recompose(est), s);
        sc.bic = std::log(static_cast<double>(s.n())) * static_cast<double>(sc.edges) - 2.0 * sc.loglik;
        sc.ebic = sc.bic + 4.0 * gamma * std::log(static_cast<double>(s.p())) * static_cast<double>(sc.edges);
        out.push_back(sc);
    }
    return out;
}

struct Selection {
    std::size_t by_bic = 0;
    std::size_t by_ebic = 0;
};

/// Argmin of BIC and EBIC along the path; ties go to the larger rho.
inline Selection select(const std::vector<SelectionScore>& scores) {
    if (scores.empty()) throw InvalidArgument("select: empty path");
    Selection sel;
    for (std::size_t k = 1; k < scores.size(); ++k) {
        if (scores[k].bic <= scores[sel.by_bic].bic) sel.by_bic = k;
        if (scores[k].ebic <= scores[sel.by_ebic].ebic) sel.by_ebic = k;
    }
    return sel;
}

inline Selection select(const PathResult& path, const CovMatrix& s, double gamma) {
    return select(score_path(path, s, gamma));
}

}  // namespace pcglasso
