#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "blasso/errors.hpp"

namespace blasso {

/// Controls for adaptive one-dimensional integration.
struct QuadratureSpec {
    double relative_tolerance = 1e-10;
    int max_subdivisions = 4000;
};

namespace detail {

// Gauss-Kronrod 7-15 abscissae/weights on [-1,1], positive half.
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename F>
void gauss_kronrod_15(const F& f, double a, double b, double& integral, double& error) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(center - half * kKronrodNodes[i]);
        fv[14 - i] = f(center + half * kKronrodNodes[i]);
    }
    fv[7] = f(center);
    double kronrod = kKronrodWeights[7] * fv[7];
    double gauss = kGaussWeights[3] * fv[7];
    for (int i = 0; i < 7; ++i) {
        kronrod += kKronrodWeights[i] * (fv[i] + fv[14 - i]);
        if (i % 2 == 1)
            gauss += kGaussWeights[i / 2] * (fv[i] + fv[14 - i]);
    }
    integral = kronrod * half;
    error = std::abs((kronrod - gauss) * half);
}

struct Segment {
    double a, b, integral, error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over [a, b].
/// Splits the segment with the largest local error bound until the summed
/// bound drops below relative_tolerance * |integral|, or throws
/// QuadratureError once max_subdivisions is exhausted.
template <typename F>
double integrate_adaptive(const F& f, double a, double b, const QuadratureSpec& spec = {}) {
    if (!(spec.relative_tolerance > 0.0))
        throw DomainError("QuadratureSpec: relative_tolerance must be > 0");
    if (spec.max_subdivisions < 1)
        throw DomainError("QuadratureSpec: max_subdivisions must be >= 1");
    if (a == b) return 0.0;

    std::priority_queue<detail::Segment> queue;
    detail::Segment whole{a, b, 0.0, 0.0};
    detail::gauss_kronrod_15(f, a, b, whole.integral, whole.error);
    queue.push(whole);
    double total = whole.integral;
    double total_error = whole.error;

    for (int n = 0; n < spec.max_subdivisions; ++n) {
        if (total_error <= spec.relative_tolerance * std::max(std::abs(total), 1e-300))
            return total;
        detail::Segment worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        detail::Segment left{worst.a, mid, 0.0, 0.0};
        detail::Segment right{mid, worst.b, 0.0, 0.0};
        detail::gauss_kronrod_15(f, left.a, left.b, left.integral, left.error);
        detail::gauss_kronrod_15(f, right.a, right.b, right.integral, right.error);
        total += left.integral + right.integral - worst.integral;
        total_error += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }
    if (total_error <= spec.relative_tolerance * std::max(std::abs(total), 1e-300))
        return total;
    throw QuadratureError("adaptive quadrature did not converge", total, total_error,
                          spec.max_subdivisions);
}

}  // namespace blasso
