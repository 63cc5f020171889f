#pragma once

// Exact maximisation of the three-variable block objective
//   f(x, y1, y2),  x in (l, u),  y1, y2 > 0
// used by each step of the blockwise coordinate descent.
//
// Stationary points with x != 0 are located along the curve where f_y1 = f_y2 = 0.
// On that curve x and y2 are explicit in y1:
//   x  = (cn / y1 - y1 - c1) / (c12 y2)
//   y2 = (-c2 +- sqrt(c2^2 + 4 (y1^2 + c1 y1))) / 2
// so f_x becomes a function of y1 alone whose sign changes are bracketed and bisected.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "pcglasso/objective.hpp"

namespace pcglasso {

struct BlockSolution {
    double x = 0.0;
    double y1 = 1.0;
    double y2 = 1.0;
    double f_value = 0.0;
};

inline constexpr int kScanIntervals = 64;
inline constexpr double kTieTol = 1e-12;

namespace detail {

/// Positive root of y^2 + c y - cn = 0.
inline double positive_root(double c, double cn) {
    const double sq = std::sqrt(c * c + 4.0 * cn);
    return c >= 0.0 ? 2.0 * cn / (c + sq) : 0.5 * (sq - c);
}

inline void check_bounded(const BlockCoefficients& k) {
    const double reach = std::max(std::abs(k.quad.l), std::abs(k.quad.u));
    if (!(std::abs(k.c12) * reach < 1.0))
        throw InvalidArgument("block subproblem is unbounded: |c12| * max|x| >= 1");
    if (!(k.cn > 0.0)) throw InvalidArgument("block subproblem needs cn > 0");
}

/// Maximiser of f over (y1, y2) for fixed x. Strictly concave when |c12 x| < 1.
inline std::array<double, 2> optimal_y(const BlockCoefficients& k, double x) {
    const double m = k.c12 * x;
    double y1 = positive_root(k.c1, k.cn);
    double y2 = positive_root(k.c2, k.cn);
    auto phi = [&](double a, double b) {
        return 2.0 * k.cn * (std::log(a) + std::log(b)) - a * a - b * b - 2.0 * m * a * b -
               2.0 * k.c1 * a - 2.0 * k.c2 * b;
    };
    double cur = phi(y1, y2);
    for (int it = 0; it < 200; ++it) {
        const double g1 = k.cn / y1 - y1 - m * y2 - k.c1;
        const double g2 = k.cn / y2 - y2 - m * y1 - k.c2;
        const double h11 = -k.cn / (y1 * y1) - 1.0;
        const double h22 = -k.cn / (y2 * y2) - 1.0;
        const double h12 = -m;
        const double det = h11 * h22 - h12 * h12;
        const double d1 = -(h22 * g1 - h12 * g2) / det;
        const double d2 = -(h11 * g2 - h12 * g1) / det;
        double t = 1.0;
        while ((y1 + t * d1 <= 0.0 || y2 + t * d2 <= 0.0) && t > 1e-20) t *= 0.5;
        double n1 = y1 + t * d1;
        double n2 = y2 + t * d2;
        double next = phi(n1, n2);
        while (next < cur - 1e-15 * std::abs(cur) && t > 1e-20) {
            t *= 0.5;
            n1 = y1 + t * d1;
            n2 = y2 + t * d2;
            next = phi(n1, n2);
        }
        const double moved = std::abs(n1 - y1) + std::abs(n2 - y2);
        y1 = n1;
        y2 = n2;
        cur = next;
        if (moved <= 1e-15 * (y1 + y2)) break;
    }
    return {y1, y2};
}

/// A point on the f_y1 = f_y2 = 0 curve parameterised by y1.
struct CurvePoint {
    bool ok = false;
    double x = 0.0;
    double y2 = 0.0;
    double g = 0.0;  ///< f_x restricted to x > 0
};

/// Works on the positive side x in (xlo, xhi), xlo >= 0. `branch` selects the root of the
/// y2 quadratic. When `strict` is false the endpoints of (xlo, xhi) are admitted.
inline CurvePoint curve_point(const BlockCoefficients& k, double y1, int branch, double xlo,
                              double xhi, bool strict) {
    CurvePoint cp;
    if (!(y1 > 0.0)) return cp;
    const double disc = k.c2 * k.c2 + 4.0 * (y1 * y1 + k.c1 * y1);
    if (disc < 0.0) return cp;
    const double y2 = 0.5 * (-k.c2 + branch * std::sqrt(disc));
    if (!(y2 > 0.0)) return cp;
    const double x = (k.cn / y1 - y1 - k.c1) / (k.c12 * y2);
    if (!std::isfinite(x)) return cp;
    if (strict ? !(x > xlo && x < xhi) : !(x >= xlo && x <= xhi)) return cp;
    const double q = k.quad(x);
    if (!(q > 0.0)) return cp;
    cp.ok = true;
    cp.x = x;
    cp.y2 = y2;
    cp.g = (2.0 * k.quad.a * x + k.quad.b) / q - 2.0 * k.c12 * y1 * y2 - 2.0 * k.rho;
    return cp;
}

/// Newton refinement of a stationary point of the smooth part of f on x > 0.
inline void polish_positive(const BlockCoefficients& k, double xlo, double xhi, double& x,
                            double& y1, double& y2) {
    auto grad = [&](double a, double b, double c) {
        const double q = k.quad(a);
        return Eigen::Vector3d((2.0 * k.quad.a * a + k.quad.b) / q - 2.0 * k.c12 * b * c - 2.0 * k.rho,
                               2.0 * k.cn / b - 2.0 * b - 2.0 * k.c12 * a * c - 2.0 * k.c1,
                               2.0 * k.cn / c - 2.0 * c - 2.0 * k.c12 * a * b - 2.0 * k.c2);
    };
    Eigen::Vector3d g = grad(x, y1, y2);
    for (int it = 0; it < 20 && g.norm() > 1e-14; ++it) {
        const double q = k.quad(x);
        const double dq = 2.0 * k.quad.a * x + k.quad.b;
        Eigen::Matrix3d h;
        h(0, 0) = (2.0 * k.quad.a * q - dq * dq) / (q * q);
        h(0, 1) = h(1, 0) = -2.0 * k.c12 * y2;
        h(0, 2) = h(2, 0) = -2.0 * k.c12 * y1;
        h(1, 1) = -2.0 * k.cn / (y1 * y1) - 2.0;
        h(2, 2) = -2.0 * k.cn / (y2 * y2) - 2.0;
        h(1, 2) = h(2, 1) = -2.0 * k.c12 * x;
        const Eigen::Vector3d step = h.partialPivLu().solve(-g);
        if (!step.allFinite()) break;
        const double nx = x + step(0);
        const double n1 = y1 + step(1);
        const double n2 = y2 + step(2);
        if (!(nx > xlo && nx < xhi && n1 > 0.0 && n2 > 0.0) || !(k.quad(nx) > 0.0)) break;
        const Eigen::Vector3d ng = grad(nx, n1, n2);
        if (!(ng.norm() < g.norm())) break;
        x = nx;
        y1 = n1;
        y2 = n2;
        g = ng;
    }
}

inline double bisect_root(const BlockCoefficients& k, int branch, double xlo, double xhi, double lo,
                          double glo, double hi) {
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const CurvePoint cp = curve_point(k, mid, branch, xlo, xhi, false);
        if (!cp.ok) throw NumericalError("root bracketing left the admissible y1 range");
        if (cp.g == 0.0) return mid;
        if ((cp.g > 0.0) == (glo > 0.0)) {
            lo = mid;
            glo = cp.g;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Admissible point closest to `bad` on the segment towards the admissible `good`.
inline std::pair<double, CurvePoint> admissible_edge(const BlockCoefficients& k, int branch, double xlo,
                                                     double xhi, double bad, double good, CurvePoint cgood) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (bad + good);
        if (mid == bad || mid == good) break;
        const CurvePoint cp = curve_point(k, mid, branch, xlo, xhi, false);
        if (cp.ok) {
            good = mid;
            cgood = cp;
        } else {
            bad = mid;
        }
    }
    return {good, cgood};
}

/// All stationary points of f with x in (xlo, xhi), 0 <= xlo < xhi. Requires c12 != 0.
inline std::vector<BlockSolution> stationary_points_positive(const BlockCoefficients& k, double xlo,
                                                             double xhi) {
    std::vector<BlockSolution> out;
    if (!(xhi > xlo)) return out;
    const double cn = k.cn;
    const double kappa = std::abs(k.c12) * std::max(std::abs(xlo), std::abs(xhi));

    // Every y-stationary point with |x| <= max|x| lies in [ymin, ymax].
    const double sc = std::sqrt(cn);
    const double y1max = (kappa * (std::abs(k.c2) + sc) + std::abs(k.c1) + sc) / (1.0 - kappa * kappa);
    const double y2max = (kappa * (std::abs(k.c1) + sc) + std::abs(k.c2) + sc) / (1.0 - kappa * kappa);
    const double bmax = kappa * y2max + std::abs(k.c1);
    const double y1min = 2.0 * cn / (bmax + std::sqrt(bmax * bmax + 4.0 * cn));

    // Breakpoints where admissibility on a branch can change: x hits xlo or xhi, the y2
    // quadratic has a double root, y2 reaches 0, and x crosses 0.
    std::vector<double> bp{0.99 * y1min, 1.01 * y1max + 1e-12};
    bp.push_back(xlo == 0.0 ? positive_root(k.c1, cn) : optimal_y(k, xlo)[0]);
    bp.push_back(optimal_y(k, xhi)[0]);
    bp.push_back(positive_root(k.c1, cn));
    if (k.c1 * k.c1 >= k.c2 * k.c2) {
        const double r = std::sqrt(k.c1 * k.c1 - k.c2 * k.c2);
        bp.push_back(0.5 * (-k.c1 + r));
        bp.push_back(0.5 * (-k.c1 - r));
    }
    bp.push_back(-k.c1);
    std::erase_if(bp, [](double v) { return !(v > 0.0) || !std::isfinite(v); });
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

    for (int branch : {1, -1}) {
        if (branch < 0 && !(k.c2 < 0.0 && k.c1 < 0.0)) continue;
        for (std::size_t s = 0; s + 1 < bp.size(); ++s) {
            const double lo = bp[s];
            const double hi = bp[s + 1];
            if (!curve_point(k, 0.5 * (lo + hi), branch, xlo, xhi, true).ok) continue;

            std::array<double, kScanIntervals + 1> ys{};
            std::array<CurvePoint, kScanIntervals + 1> cps{};
            for (int t = 0; t <= kScanIntervals; ++t) {
                ys[t] = t == kScanIntervals ? hi : lo + (hi - lo) * t / kScanIntervals;
                cps[t] = curve_point(k, ys[t], branch, xlo, xhi, false);
            }
            // Breakpoints are computed in floating point, so an end of the range can land just
            // outside the admissible set; move it onto the set's edge.
            if (!cps[0].ok && cps[1].ok)
                std::tie(ys[0], cps[0]) = admissible_edge(k, branch, xlo, xhi, ys[0], ys[1], cps[1]);
            if (!cps[kScanIntervals].ok && cps[kScanIntervals - 1].ok)
                std::tie(ys[kScanIntervals], cps[kScanIntervals]) =
                    admissible_edge(k, branch, xlo, xhi, ys[kScanIntervals], ys[kScanIntervals - 1],
                                    cps[kScanIntervals - 1]);
            for (int t = 0; t < kScanIntervals; ++t) {
                double root;
                if (cps[t].ok && cps[t].g == 0.0) {
                    root = ys[t];
                } else if (cps[t].ok && cps[t + 1].ok && (cps[t].g > 0.0) != (cps[t + 1].g > 0.0) &&
                           cps[t + 1].g != 0.0) {
                    root = bisect_root(k, branch, xlo, xhi, ys[t], cps[t].g, ys[t + 1]);
                } else {
                    continue;
                }
                const CurvePoint cp = curve_point(k, root, branch, xlo, xhi, false);
                if (!cp.ok) continue;
                double x = cp.x;
                double y1 = root;
                double y2 = cp.y2;
                if (x > xlo && x < xhi) polish_positive(k, xlo, xhi, x, y1, y2);
                if (!(x > xlo && x < xhi)) continue;
                out.push_back({x, y1, y2, block_objective(k, x, y1, y2)});
            }
        }
    }
    return out;
}

inline BlockCoefficients reflect(const BlockCoefficients& k) {
    BlockCoefficients r = k;
    r.c12 = -k.c12;
    r.quad.b = -k.quad.b;
    r.quad.l = -k.quad.u;
    r.quad.u = -k.quad.l;
    return r;
}

inline bool preferred(const BlockSolution& cand, const BlockSolution& best) {
    if (cand.f_value > best.f_value + kTieTol) return true;
    if (cand.f_value < best.f_value - kTieTol) return false;
    return std::abs(cand.x) < std::abs(best.x);
}

inline std::optional<BlockSolution> best_of(const std::vector<BlockSolution>& v) {
    std::optional<BlockSolution> best;
    for (const auto& s : v)
        if (!best || preferred(s, *best)) best = s;
    return best;
}

}  // namespace detail

/// x = 0 with the closed-form optimal (y1, y2).
inline BlockSolution solve_x_zero(const BlockCoefficients& k) {
    if (!k.quad.zero_feasible()) throw InvalidArgument("solve_x_zero: x = 0 is infeasible (c <= 0)");
    const double y1 = detail::positive_root(k.c1, k.cn);
    const double y2 = detail::positive_root(k.c2, k.cn);
    return {0.0, y1, y2, block_objective(k, 0.0, y1, y2)};
}

/// Best stationary point with x in (max(l, 0), u), if any.
inline std::optional<BlockSolution> solve_x_positive(const BlockCoefficients& k) {
    if (k.c12 == 0.0) throw InvalidArgument("solve_x_positive: c12 = 0 is the separable case");
    const double xlo = std::max(k.quad.l, 0.0);
    if (!(k.quad.u > xlo)) throw InvalidArgument("solve_x_positive: no feasible x > 0");
    detail::check_bounded(k);
    return detail::best_of(detail::stationary_points_positive(k, xlo, k.quad.u));
}

/// Best stationary point with x in (l, min(u, 0)): the positive search on the problem
/// reflected through x -> -x.
inline std::optional<BlockSolution> solve_x_negative(const BlockCoefficients& k) {
    auto s = solve_x_positive(detail::reflect(k));
    if (s) s->x = -s->x;
    return s;
}

/// c12 = 0: f separates into a function of x and independent functions of y1, y2.
inline BlockSolution solve_x_separable(const BlockCoefficients& k) {
    if (k.c12 != 0.0) throw InvalidArgument("solve_x_separable: requires c12 = 0");
    const double y1 = detail::positive_root(k.c1, k.cn);
    const double y2 = detail::positive_root(k.c2, k.cn);
    const DetQuadratic& q = k.quad;
    std::vector<double> xs;
    if (q.zero_feasible()) xs.push_back(0.0);
    if (k.rho == 0.0) {
        if (q.a != 0.0) xs.push_back(-q.b / (2.0 * q.a));
    } else {
        for (double sgn : {1.0, -1.0}) {
            // (2ax + b) - 2 rho sgn (a x^2 + b x + c) = 0
            const double qa = -2.0 * k.rho * sgn * q.a;
            const double qb = 2.0 * q.a - 2.0 * k.rho * sgn * q.b;
            const double qc = q.b - 2.0 * k.rho * sgn * q.c;
            const double disc = qb * qb - 4.0 * qa * qc;
            if (disc < 0.0) continue;
            const double sq = std::sqrt(disc);
            const double t = -0.5 * (qb + std::copysign(sq, qb));
            for (double r : {t / qa, t != 0.0 ? qc / t : 0.0})
                if (std::isfinite(r) && r * sgn > 0.0) xs.push_back(r);
        }
    }
    std::vector<BlockSolution> cands;
    for (double x : xs)
        if (q.contains(x) || (x == 0.0 && q.zero_feasible()))
            cands.push_back({x, y1, y2, block_objective(k, x, y1, y2)});
    auto best = detail::best_of(cands);
    if (!best) throw NumericalError("solve_x_separable: no feasible candidate");
    return *best;
}

/// Global maximiser of f over x in (l, u), y1, y2 > 0.
inline BlockSolution solve_block(const BlockCoefficients& k) {
    if (k.c12 == 0.0) return solve_x_separable(k);
    detail::check_bounded(k);
    std::vector<BlockSolution> cands;
    if (k.quad.zero_feasible()) cands.push_back(solve_x_zero(k));
    if (k.quad.u > std::max(k.quad.l, 0.0))
        for (auto& s : detail::stationary_points_positive(k, std::max(k.quad.l, 0.0), k.quad.u))
            cands.push_back(s);
    if (k.quad.l < std::min(k.quad.u, 0.0)) {
        const BlockCoefficients r = detail::reflect(k);
        for (auto s : detail::stationary_points_positive(r, std::max(r.quad.l, 0.0), r.quad.u)) {
            s.x = -s.x;
            cands.push_back(s);
        }
    }
    auto best = detail::best_of(cands);
    if (!best) throw NumericalError("solve_block: no feasible candidate");
    return *best;
}

/// The quartic q(y1) whose sign encodes x < u on the positive-root branch with x > 0.
inline double upper_bound_quartic(const BlockCoefficients& k, double u, double y1) {
    const double uc = u * k.c12;
    const double inv2 = 1.0 / (uc * uc);
    const double c1 = k.c1, c2 = k.c2, cn = k.cn;
    const double a4 = 1.0 - inv2;
    const double a3 = c1 - 2.0 * c1 * inv2 + c2 / uc;
    const double a2 = 2.0 * cn * inv2 - c1 * c1 * inv2 + c1 * c2 / uc;
    const double a1 = 2.0 * c1 * cn * inv2 - c2 * cn / uc;
    const double a0 = -cn * cn * inv2;
    return (((a4 * y1 + a3) * y1 + a2) * y1 + a1) * y1 + a0;
}

/// Whether x(y1) < u holds on the positive-root branch (for y1 with x(y1) > 0), expressed
/// through the quartic. For c12 > 0: y1 above the threshold or q(y1) > 0. For c12 < 0: y1
/// below the threshold or q(y1) > 0. q(y1) is (rhs^2 - lhs^2) y1^2 / 4 for the squared form of
/// the inequality, so its required sign does not depend on the sign of c12.
inline bool upper_bound_holds_via_quartic(const BlockCoefficients& k, double u, double y1) {
    const double e = k.c1 - 0.5 * u * k.c12 * k.c2;
    const double thresh = 0.5 * (-e + std::sqrt(e * e + 4.0 * k.cn));
    const double q = upper_bound_quartic(k, u, y1);
    if (k.c12 > 0.0) return y1 > thresh || q > 0.0;
    return y1 < thresh || q > 0.0;
}

}  // namespace pcglasso
