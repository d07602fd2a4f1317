#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "blasso/errors.hpp"
#include "blasso/quadrature.hpp"

namespace blasso::specfun {

/// ln Gamma(nu) for nu > 0.
inline double log_gamma(double nu) {
    if (!(nu > 0.0)) throw DomainError("log_gamma: nu must be > 0");
    return std::lgamma(nu);
}

namespace detail {

// Finite sum Gamma(p,x) = (p-1)! e^{-x} sum_{k<p} x^k/k! for integer p.
inline double upper_gamma_integer(int p, double x) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < p; ++k) {
        term *= x / static_cast<double>(k);
        sum += term;
    }
    return std::tgamma(static_cast<double>(p)) * std::exp(-x) * sum;
}

// Regularized lower incomplete gamma P(a,x) by series, valid for x < a+1.
inline double gamma_p_series(double a, double x) {
    constexpr int kMaxIter = 500;
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw NumericalError("gamma_p_series: no convergence");
}

// Regularized upper incomplete gamma Q(a,x) by continued fraction (Lentz),
// valid for x >= a+1.
inline double gamma_q_contfrac(double a, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kTiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16)
            return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    }
    throw NumericalError("gamma_q_contfrac: no convergence");
}

}  // namespace detail

/// Upper incomplete gamma Gamma(nu, x) = int_x^inf e^{-t} t^{nu-1} dt.
/// Integer nu uses the exact finite series; otherwise the classic
/// series / continued-fraction split at x = nu + 1.
inline double upper_incomplete_gamma(double nu, double x) {
    if (!(nu > 0.0)) throw DomainError("upper_incomplete_gamma: nu must be > 0");
    if (x < 0.0) throw DomainError("upper_incomplete_gamma: x must be >= 0");
    if (x == 0.0) return std::tgamma(nu);
    const double rounded = std::nearbyint(nu);
    if (std::abs(nu - rounded) < 1e-12 && rounded >= 1.0 && rounded <= 170.0)
        return detail::upper_gamma_integer(static_cast<int>(rounded), x);
    if (x < nu + 1.0)
        return std::tgamma(nu) * (1.0 - detail::gamma_p_series(nu, x));
    return std::tgamma(nu) * detail::gamma_q_contfrac(nu, x);
}

/// Standard normal distribution function.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// Mills ratio sqrt(2 pi) e^{x^2/2} (1 - F(x)), evaluated without forming
/// the under/overflowing factors. For x > 30 the asymptotic tail expansion
/// is used (relative error < 1e-15 there).
inline double mills_ratio(double x) {
    if (x > 30.0) {
        const double inv2 = 1.0 / (x * x);
        double series = 1.0 + inv2 * (-1.0 + inv2 * (3.0 + inv2 * (-15.0 + inv2 * (105.0 + inv2 * (-945.0 + inv2 * 10395.0)))));
        return series / x;
    }
    return std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x) *
           (0.5 * std::erfc(x / std::numbers::sqrt2));
}

/// ln of int_0^inf exp(-r^2/2 - z r) r^{nu-1} dr, the weighted parabolic
/// cylinder combination ln[Gamma(nu) e^{z^2/4} D_{-nu}(z)].
///
/// The integrand is rescaled by its maximum before quadrature, so values of
/// nu up to a few hundred and |z| up to a few hundred stay inside double
/// range. For nu < 1 the endpoint singularity is removed by the
/// substitution t = r^nu.
inline double log_weighted_cylinder(double nu, double z, const QuadratureSpec& spec = {}) {
    if (!(nu > 0.0)) throw DomainError("log_weighted_cylinder: nu must be > 0");

    if (nu < 1.0) {
        // value = (1/nu) int_0^inf exp(-phi(t)) dt, phi(t) = t^{2/nu}/2 + z t^{1/nu}
        const double r_min = z < 0.0 ? -z : 0.0;
        const double phi_min = z < 0.0 ? -0.5 * z * z : 0.0;
        auto phi = [&](double t) {
            const double r = std::pow(t, 1.0 / nu);
            return 0.5 * r * r + z * r;
        };
        double upper = std::max(std::pow(r_min, nu), 1.0);
        while (phi(upper) - phi_min < 45.0) upper *= 2.0;
        auto integrand = [&](double t) { return std::exp(phi_min - phi(t)); };
        const double integral = integrate_adaptive(integrand, 0.0, upper, spec);
        return -phi_min - std::log(nu) + std::log(integral);
    }

    auto log_integrand = [&](double r) {
        return -0.5 * r * r - z * r + (nu - 1.0) * std::log(r);
    };
    double r_peak;
    if (nu > 1.0)
        r_peak = 0.5 * (-z + std::sqrt(z * z + 4.0 * (nu - 1.0)));
    else
        r_peak = std::max(0.0, -z);
    const double log_max = r_peak > 0.0 ? log_integrand(r_peak) : 0.0;

    double upper = r_peak > 0.0 ? r_peak : 1.0;
    while (log_integrand(upper) - log_max > -45.0) upper *= 2.0;

    auto integrand = [&](double r) {
        if (r <= 0.0) return nu == 1.0 ? std::exp(-log_max) : 0.0;
        return std::exp(log_integrand(r) - log_max);
    };
    const double integral = integrate_adaptive(integrand, 0.0, upper, spec);
    return log_max + std::log(integral);
}

}  // namespace blasso::specfun
