#pragma once

// Minimal SVG 1.1 line plot of partial-correlation paths. Output bytes depend only on
// the inputs.

#include <algorithm>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>

#include "pcglasso/descent.hpp"

namespace pcglasso::svg {

namespace detail {
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}
}  // namespace detail

/// One polyline per pair i < j showing -Delta_ij (the partial correlation) against rho.
/// With a truth matrix, pairs that are nonzero in the truth are drawn in red on top.
inline std::string path_plot(const PathResult& path, const std::optional<Matrix>& truth = std::nullopt) {
    if (path.size() == 0) throw InvalidArgument("path_plot: empty path");
    const Index p = path.estimates.front().p();
    if (truth && truth->rows() != p) throw InvalidArgument("path_plot: truth dimension mismatch");
    constexpr double W = 640, H = 400, ML = 60, MR = 20, MT = 20, MB = 50;
    const double rmax = std::max(path.rhos.back(), 1e-12);
    double ymax = 0.0;
    for (const auto& e : path.estimates)
        for (Index i = 0; i < p; ++i)
            for (Index j = i + 1; j < p; ++j) ymax = std::max(ymax, std::abs(e.delta()(i, j)));
    ymax = ymax > 0.0 ? ymax * 1.05 : 1.0;
    auto px = [&](double r) { return ML + (W - ML - MR) * r / rmax; };
    auto py = [&](double v) { return MT + (H - MT - MB) * (0.5 - 0.5 * v / ymax); };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<line x1=\"" << ML << "\" y1=\"" << detail::fmt(py(0.0)) << "\" x2=\"" << W - MR << "\" y2=\""
        << detail::fmt(py(0.0)) << "\" stroke=\"#999999\" stroke-width=\"0.5\"/>\n";
    out << "<rect x=\"" << ML << "\" y=\"" << MT << "\" width=\"" << W - ML - MR << "\" height=\""
        << H - MT - MB << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\" font-size=\"12\">rho</text>\n";
    out << "<text x=\"15\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 15 "
        << H / 2 << ")\">partial correlation</text>\n";
    out << "<text x=\"" << ML - 5 << "\" y=\"" << detail::fmt(py(ymax) + 4) << "\" text-anchor=\"end\" font-size=\"10\">"
        << detail::fmt(ymax) << "</text>\n";
    out << "<text x=\"" << ML - 5 << "\" y=\"" << detail::fmt(py(-ymax) + 4)
        << "\" text-anchor=\"end\" font-size=\"10\">" << detail::fmt(-ymax) << "</text>\n";
    out << "<text x=\"" << W - MR << "\" y=\"" << H - MB + 15 << "\" text-anchor=\"end\" font-size=\"10\">"
        << detail::fmt(rmax) << "</text>\n";

    for (int pass = 0; pass < 2; ++pass) {
        for (Index i = 0; i < p; ++i)
            for (Index j = i + 1; j < p; ++j) {
                const bool hot = truth && (*truth)(i, j) != 0.0;
                if ((pass == 1) != hot) continue;
                out << "<polyline fill=\"none\" stroke=\"" << (hot ? "#d62728" : "#7f7f7f")
                    << "\" stroke-width=\"" << (hot ? "1.5" : "0.8") << "\" points=\"";
                for (std::size_t k = 0; k < path.size(); ++k) {
                    if (k) out << ' ';
                    out << detail::fmt(px(path.rhos[k])) << ','
                        << detail::fmt(py(-path.estimates[k].delta()(i, j)));
                }
                out << "\"><title>" << i + 1 << '-' << j + 1 << "</title></polyline>\n";
            }
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace pcglasso::svg
