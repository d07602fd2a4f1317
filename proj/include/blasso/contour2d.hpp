#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "blasso/geometry.hpp"
#include "blasso/specfun.hpp"

namespace blasso::contour2d {

using geometry::Direction;
using geometry::GeometryContext;

/// Z_2(s) for ||s||_1 = 1, y = 0, written as a function of b^2 = |As|^2:
///   z2(b^2) = (1 - x m(x)) x^2,  x = 1/b,  m = Mills ratio.
/// This is the value of the defining radial integral
/// int_0^inf exp(-b^2 r^2/2 - r) r dr; it decreases from 1 (the Ker(A)
/// value) as b grows. Below b = 0.05 the subtraction is replaced by the
/// tail expansion 1 - 3b^2 + 15b^4 - ... to dodge the overflow/cancellation
/// region of the direct form.
inline double z2(double b_squared) {
    if (!(b_squared > 0.0)) throw DomainError("z2: argument must be > 0");
    const double b = std::sqrt(b_squared);
    if (b < 0.05) {
        const double u = b * b;
        return 1.0 + u * (-3.0 + u * (15.0 + u * (-105.0 + u * (945.0 - u * 10395.0))));
    }
    const double x = 1.0 / b;
    return (1.0 - x * specfun::mills_ratio(x)) * x * x;
}

/// Z_2(s) for the p = 2, n = 1 case with general scalar observation y:
///   Z_2(s) = e^{-y^2/2} (1 - w m(w)) / |As|^2,  w = omega_lasso(s),
/// which reduces to z2(|As|^2) when y = 0 and to e^{-y^2/2} on Ker(A).
/// (The closed form is fixed by agreement with the radial quadrature.)
inline double partition_direction(const GeometryContext& ctx, const Direction& s) {
    if (ctx.p() != 2 || ctx.n() != 1)
        throw DimensionError("partition_direction: requires p = 2, n = 1");
    if (s.tag() != geometry::NormTag::l1)
        throw DomainError("partition_direction: direction must be l1-normalized");
    const double a = (ctx.matrix() * s.vec()).norm();
    const double half_y2 = 0.5 * ctx.observation().squaredNorm();
    if (geometry::detail::in_kernel(ctx, a, 1.0) || a == 0.0)
        return std::exp(-half_y2);
    const double omega = geometry::omega_lasso(ctx, s.vec());
    if (ctx.observation()[0] == 0.0) return z2(a * a);
    return std::exp(-half_y2) * (1.0 - omega * specfun::mills_ratio(omega)) / (a * a);
}

/// One point of the contour C(A, 0), tagged with the |a1 s1 + a2 s2| value
/// that generated it and which construction branch produced it.
struct ContourPoint {
    enum class Source { kernel, omega_extremal, solved_b };
    double x1;
    double x2;
    double direction_b;
    Source source;
};

/// Endpoints of Ker(A) intersected with the contour: the l1-normalized
/// kernel direction and its opposite (r_max = 1 there when y = 0).
inline std::pair<std::array<double, 2>, std::array<double, 2>> kernel_segment(double a1,
                                                                              double a2) {
    const double d = std::abs(a1) + std::abs(a2);
    if (d == 0.0) throw DomainError("kernel_segment: matrix must be nonzero");
    return {{-a2 / d, a1 / d}, {a2 / d, -a1 / d}};
}

namespace detail {

inline void append_solved(std::vector<ContourPoint>& out, double a1, double a2, double b,
                          double scale, ContourPoint::Source source) {
    // Edges of the l1 circle: s = (s1 * u, s2 * (1-u)), u in [0,1], with
    // sign pattern (s1, s2); A s is affine in u on each edge.
    constexpr double kSigns[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    for (const auto& sign : kSigns) {
        const double alpha = a1 * sign[0] - a2 * sign[1];
        const double beta = a2 * sign[1];
        if (alpha == 0.0) continue;  // |As| constant on this edge; extremal branch
        for (const double target : {b, -b}) {
            const double u = (target - beta) / alpha;
            if (u < 0.0 || u > 1.0) continue;
            out.push_back({scale * sign[0] * u, scale * sign[1] * (1.0 - u), b, source});
        }
    }
}

}  // namespace detail

/// The full contour of B((a1, a2), 0): kernel endpoints, the extremal set
/// where |As| attains the operator norm (scaled by sqrt(z2(lambda^2))),
/// and four points a s per grid value of b solved per l1-circle edge from
/// z2(b^2) = a^2. Points come back sorted by angle for direct plotting.
inline std::vector<ContourPoint> contour_points(double a1, double a2, int n_grid) {
    if (std::abs(a1) + std::abs(a2) == 0.0)
        throw DomainError("contour_points: matrix must be nonzero");
    if (n_grid < 1) throw DomainError("contour_points: n_grid must be >= 1");
    const double lambda = std::max(std::abs(a1), std::abs(a2));
    std::vector<ContourPoint> points;
    points.reserve(static_cast<std::size_t>(4 * n_grid) + 16);

    const auto [kp_plus, kp_minus] = kernel_segment(a1, a2);
    points.push_back({kp_plus[0], kp_plus[1], 0.0, ContourPoint::Source::kernel});
    points.push_back({kp_minus[0], kp_minus[1], 0.0, ContourPoint::Source::kernel});

    const double scale_extremal = std::sqrt(z2(lambda * lambda));
    if (std::abs(std::abs(a1) - std::abs(a2)) <= 1e-12 * lambda) {
        // |As| = lambda on a whole edge pair; sample both scaled edges.
        const double s2_sign = a1 * a2 > 0.0 ? 1.0 : -1.0;
        const int per_edge = std::max(2, n_grid / 4);
        for (int k = 0; k < per_edge; ++k) {
            const double u = static_cast<double>(k) / static_cast<double>(per_edge - 1);
            const double x1 = scale_extremal * u;
            const double x2 = scale_extremal * s2_sign * (1.0 - u);
            points.push_back({x1, x2, lambda, ContourPoint::Source::omega_extremal});
            points.push_back({-x1, -x2, lambda, ContourPoint::Source::omega_extremal});
        }
    } else if (std::abs(a2) > std::abs(a1)) {
        const double sgn = a2 > 0.0 ? 1.0 : -1.0;
        points.push_back({0.0, sgn * scale_extremal, lambda, ContourPoint::Source::omega_extremal});
        points.push_back({0.0, -sgn * scale_extremal, lambda, ContourPoint::Source::omega_extremal});
    } else {
        const double sgn = a1 > 0.0 ? 1.0 : -1.0;
        points.push_back({sgn * scale_extremal, 0.0, lambda, ContourPoint::Source::omega_extremal});
        points.push_back({-sgn * scale_extremal, 0.0, lambda, ContourPoint::Source::omega_extremal});
    }

    // Geometric grid in b toward 0; z2 is flat (-> 1) there, so the log
    // spacing mostly resolves the knee near lambda.
    for (int k = 0; k < n_grid; ++k) {
        const double t = (static_cast<double>(k) + 0.5) / static_cast<double>(n_grid);
        const double b = lambda * std::pow(10.0, -3.0 * (1.0 - t));
        const double scale = std::sqrt(z2(b * b));
        detail::append_solved(points, a1, a2, b, scale, ContourPoint::Source::solved_b);
    }

    std::sort(points.begin(), points.end(), [](const ContourPoint& lhs, const ContourPoint& rhs) {
        return std::atan2(lhs.x2, lhs.x1) < std::atan2(rhs.x2, rhs.x1);
    });
    return points;
}

/// Shoelace area of the angle-ordered point set (the contour is
/// star-shaped about the origin, so this is the enclosed area).
inline double polygon_area(const std::vector<ContourPoint>& points) {
    if (points.size() < 3) return 0.0;
    double twice_area = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const ContourPoint& cur = points[i];
        const ContourPoint& nxt = points[(i + 1) % points.size()];
        twice_area += cur.x1 * nxt.x2 - nxt.x1 * cur.x2;
    }
    return 0.5 * std::abs(twice_area);
}

}  // namespace blasso::contour2d
