#pragma once

#include <cmath>
#include <optional>

#include "blasso/geometry.hpp"
#include "blasso/radial.hpp"
#include "blasso/specfun.hpp"

namespace blasso::concentration {

using geometry::Direction;
using geometry::GeometryContext;

/// Tail bound P(q,p) together with its complement and, for q > 1, the
/// Natalini-style exponential simplification.
struct TailBoundReport {
    double q;
    int p;
    double tail_bound;
    double containment_probability;
    std::optional<double> natalini_bound;
};

/// P(q,p) = p e^{p-1} / (p-1)^p * Gamma(p, q(p-1)). The prefactor is
/// assembled in log scale so large p does not overflow.
inline TailBoundReport tail_bound(double q, int p) {
    if (!(q > 0.0)) throw DomainError("tail_bound: q must be > 0");
    if (p < 2) throw DomainError("tail_bound: p must be >= 2");
    const double pm1 = static_cast<double>(p - 1);
    const double log_prefactor = std::log(static_cast<double>(p)) + pm1 - p * std::log(pm1);
    const double bound =
        std::exp(log_prefactor) * specfun::upper_incomplete_gamma(static_cast<double>(p), q * pm1);
    TailBoundReport report;
    report.q = q;
    report.p = p;
    report.tail_bound = bound;
    report.containment_probability = std::max(0.0, 1.0 - bound);
    if (q > 1.0)
        report.natalini_bound = std::exp(std::log(2.0 * p) + pm1 * std::log(q) -
                                         std::log(pm1) - (q - 1.0) * pm1);
    return report;
}

/// r(s) = (-w + sqrt(w^2 + 4(p-1))) / (2 ||As||_2), the unique positive
/// root of ||As||_2 (r ||As||_2 + w) = (p-1)/r and the mode of the radial
/// density along s.
inline double concentration_radius(const GeometryContext& ctx, const Direction& s) {
    if (ctx.p() < 2) throw DomainError("concentration_radius: requires p >= 2");
    const double a = (ctx.matrix() * s.vec()).norm();
    const double omega = geometry::omega_lasso(ctx, s.vec());  // throws on kernel directions
    const double pm1 = static_cast<double>(ctx.p() - 1);
    return 0.5 * (-omega + std::sqrt(omega * omega + 4.0 * pm1)) / a;
}

/// Concentration radius about an arbitrary lasso point l: the root of
/// r d/dr f(r s + l) = p - 1. The radial derivative uses the right
/// derivative at l1 kinks (sign(0) := sign(s_j)), which makes
/// h(r) = r d/dr f - (p-1) right-continuous and increasing, so a bracketed
/// bisection converges unconditionally.
inline double concentration_radius_about(const GeometryContext& ctx,
                                         const Eigen::Ref<const Eigen::VectorXd>& l,
                                         const Direction& s) {
    if (ctx.p() < 2) throw DomainError("concentration_radius_about: requires p >= 2");
    if (l.size() != ctx.p())
        throw DimensionError("concentration_radius_about: center length must equal p");
    const Eigen::VectorXd as = ctx.matrix() * s.vec();
    const Eigen::VectorXd residual_at_l = ctx.matrix() * l - ctx.observation();
    const double as_sq = as.squaredNorm();
    const double as_dot = as.dot(residual_at_l);
    const double pm1 = static_cast<double>(ctx.p() - 1);

    auto radial_derivative = [&](double r) {
        double kink_sum = 0.0;
        for (Eigen::Index j = 0; j < ctx.p(); ++j) {
            const double sj = s.vec()[j];
            if (sj == 0.0) continue;
            const double coord = r * sj + l[j];
            const double sign = coord != 0.0 ? (coord > 0.0 ? 1.0 : -1.0)
                                             : (sj > 0.0 ? 1.0 : -1.0);
            kink_sum += sj * sign;
        }
        return r * as_sq + as_dot + kink_sum;
    };
    auto h = [&](double r) { return r * radial_derivative(r) - pm1; };

    double hi = 1.0;
    int doublings = 0;
    while (h(hi) < 0.0) {
        hi *= 2.0;
        if (++doublings > 200)
            throw NumericalError("concentration_radius_about: bracket expansion failed");
    }
    double lo = 0.0;
    for (int i = 0; i < 2000 && hi - lo > 1e-10; ++i) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Draws n radii from the exact radial law along s and compares the
/// empirical exceedance frequency of q r(s) with the tail bound. Throws if
/// the guaranteed inequality fails beyond three Monte Carlo sigmas.
inline std::pair<double, double> empirical_tail_check(const GeometryContext& ctx,
                                                      const Direction& s, double q,
                                                      std::int64_t n_samples,
                                                      std::uint64_t seed) {
    if (n_samples < 1000)
        throw DomainError("empirical_tail_check: need at least 1000 samples");
    const double radius = concentration_radius(ctx, s);
    const double threshold = q * radius;
    const auto radii = radial::sample_radial_exact(ctx, s, n_samples, seed);
    std::int64_t exceed = 0;
    for (double r : radii)
        if (r >= threshold) ++exceed;
    const double empirical = static_cast<double>(exceed) / static_cast<double>(n_samples);
    const double bound = tail_bound(q, static_cast<int>(ctx.p())).tail_bound;
    if (empirical > bound + 3.0 * std::sqrt(bound / static_cast<double>(n_samples)))
        throw NumericalError("empirical_tail_check: tail bound violated beyond 3 sigma");
    return {empirical, bound};
}

}  // namespace blasso::concentration
