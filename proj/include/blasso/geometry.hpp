#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <future>
#include <vector>

#include "blasso/errors.hpp"
#include "blasso/quadrature.hpp"
#include "blasso/rng.hpp"
#include "blasso/specfun.hpp"

namespace blasso::geometry {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// The (A, y) pair every formula is conditioned on, with the cached
/// quantities A^T y, per-column l2 norms and the l1->l2 operator norm
/// (attained at a signed standard basis vector, hence the max column norm).
class GeometryContext {
public:
    GeometryContext(MatrixXd design, VectorXd observation)
        : A_(std::move(design)), y_(std::move(observation)) {
        if (A_.rows() < 1 || A_.cols() < 1)
            throw DimensionError("GeometryContext: matrix must be at least 1x1");
        if (y_.size() != A_.rows())
            throw DimensionError("GeometryContext: y length must equal row count of A");
        At_y_ = A_.transpose() * y_;
        column_norms_ = A_.colwise().norm();
        operator_norm_1_2_ = column_norms_.maxCoeff();
    }

    const MatrixXd& matrix() const { return A_; }
    const VectorXd& observation() const { return y_; }
    const VectorXd& At_y() const { return At_y_; }
    const VectorXd& column_norms() const { return column_norms_; }
    double operator_norm_1_2() const { return operator_norm_1_2_; }
    Eigen::Index p() const { return A_.cols(); }
    Eigen::Index n() const { return A_.rows(); }

private:
    MatrixXd A_;
    VectorXd y_;
    VectorXd At_y_;
    VectorXd column_norms_;
    double operator_norm_1_2_;
};

enum class NormTag { l1, l2 };

/// A vector of unit length under the tagged norm.
class Direction {
public:
    Direction(VectorXd v, NormTag tag) : v_(std::move(v)), tag_(tag) {
        const double norm = tag_ == NormTag::l1 ? v_.lpNorm<1>() : v_.norm();
        if (std::abs(norm - 1.0) > 1e-12)
            throw DomainError("Direction: vector is not unit under the tagged norm");
    }

    static Direction l1_normalized(const VectorXd& v) {
        const double norm = v.lpNorm<1>();
        if (norm <= 0.0) throw DomainError("Direction: zero vector");
        return Direction(v / norm, NormTag::l1);
    }

    static Direction l2_normalized(const VectorXd& v) {
        const double norm = v.norm();
        if (norm <= 0.0) throw DomainError("Direction: zero vector");
        return Direction(v / norm, NormTag::l2);
    }

    const VectorXd& vec() const { return v_; }
    NormTag tag() const { return tag_; }

private:
    VectorXd v_;
    NormTag tag_;
};

namespace detail {

// Scale-free cutoff below which a direction counts as lying in Ker(A).
inline bool in_kernel(const GeometryContext& ctx, double ax_norm, double x_l1) {
    return ax_norm <= 1e-12 * x_l1 * ctx.operator_norm_1_2();
}

inline void check_length(const GeometryContext& ctx, const Eigen::Ref<const VectorXd>& x,
                         const char* where) {
    if (x.size() != ctx.p())
        throw DimensionError(std::string(where) + ": vector length must equal p");
}

}  // namespace detail

/// f(x) = ||A x - y||_2^2 / 2 + ||x||_1.
inline double objective(const GeometryContext& ctx, const Eigen::Ref<const VectorXd>& x) {
    detail::check_length(ctx, x, "objective");
    return 0.5 * (ctx.matrix() * x - ctx.observation()).squaredNorm() + x.lpNorm<1>();
}

/// The scale-invariant statistic (||x||_1 - <Ax, y>) / ||Ax||_2.
inline double omega_lasso(const GeometryContext& ctx, const Eigen::Ref<const VectorXd>& x) {
    detail::check_length(ctx, x, "omega_lasso");
    const VectorXd ax = ctx.matrix() * x;
    const double a = ax.norm();
    const double l1 = x.lpNorm<1>();
    if (detail::in_kernel(ctx, a, l1) || a == 0.0)
        throw SingularDirectionError("omega_lasso: Ax is numerically zero");
    return (l1 - ax.dot(ctx.observation())) / a;
}

namespace detail {

// Mode of r -> -f(r x) + (p-1) ln r; the integrand peak used to rescale
// the radial integrals.
inline double radial_mode(double a, double omega_times_a, double l1, Eigen::Index p) {
    const double pm1 = static_cast<double>(p - 1);
    if (p >= 2) {
        if (a > 0.0) {
            const double omega = omega_times_a / a;
            return 0.5 * (-omega + std::sqrt(omega * omega + 4.0 * pm1)) / a;
        }
        return pm1 / l1;
    }
    if (a > 0.0) return std::max(0.0, -omega_times_a / (a * a));
    return 0.0;
}

}  // namespace detail

/// Mode of the radial density r -> exp(-f(r x)) r^{p-1} along x; for
/// p >= 2 and Ax != 0 this is the concentration radius along x.
inline double radial_density_mode(const GeometryContext& ctx,
                                  const Eigen::Ref<const VectorXd>& x) {
    detail::check_length(ctx, x, "radial_density_mode");
    const double l1 = x.lpNorm<1>();
    if (l1 <= 0.0) throw DomainError("radial_density_mode: x must be nonzero");
    const VectorXd ax = ctx.matrix() * x;
    return detail::radial_mode(ax.norm(), l1 - ax.dot(ctx.observation()), l1, ctx.p());
}

/// Z_p(x) = int_0^inf exp(-f(r x)) r^{p-1} dr by direct numerical
/// quadrature of f. This is the reference route the closed form is tested
/// against; it never goes through the parabolic cylinder representation.
inline double partition_radial(const GeometryContext& ctx, const Eigen::Ref<const VectorXd>& x,
                               const QuadratureSpec& spec = {}) {
    detail::check_length(ctx, x, "partition_radial");
    const double l1 = x.lpNorm<1>();
    if (l1 <= 0.0) throw DomainError("partition_radial: x must be nonzero");
    const VectorXd ax = ctx.matrix() * x;
    const VectorXd& y = ctx.observation();
    const Eigen::Index p = ctx.p();
    const double pm1 = static_cast<double>(p - 1);

    auto log_density = [&](double r) {
        const double f = 0.5 * (r * ax - y).squaredNorm() + r * l1;
        return p == 1 ? -f : -f + pm1 * std::log(r);
    };

    const double a = ax.norm();
    const double shifted_slope = l1 - ax.dot(y);  // omega * a when a > 0
    const double r_peak = detail::radial_mode(a, shifted_slope, l1, p);
    const double log_max = (r_peak > 0.0 || p == 1) ? log_density(std::max(r_peak, 0.0))
                                                    : log_density(1.0);

    double upper = r_peak > 0.0 ? r_peak : 1.0 / (1.0 + a + l1);
    while (log_density(upper) - log_max > -45.0) upper *= 2.0;

    auto integrand = [&](double r) {
        if (r <= 0.0) return p == 1 ? std::exp(log_density(0.0) - log_max) : 0.0;
        return std::exp(log_density(r) - log_max);
    };
    const double integral = integrate_adaptive(integrand, 0.0, upper, spec);
    return std::exp(log_max) * integral;
}

/// ln Z_p(x) through the closed form: for Ax != 0
///   ln Z_p(x) = -||y||^2/2 - p ln ||Ax||_2 + ln[Gamma(p) e^{w^2/4} D_{-p}(w)]
/// with w = omega_lasso(x); on Ker(A) the exact Gamma-integral branch
///   ln Z_p(x) = ln Gamma(p) - p ln ||x||_1 - ||y||^2/2.
inline double partition_log_closed(const GeometryContext& ctx,
                                   const Eigen::Ref<const VectorXd>& x,
                                   const QuadratureSpec& spec = {}) {
    detail::check_length(ctx, x, "partition_log_closed");
    const double l1 = x.lpNorm<1>();
    if (l1 <= 0.0) throw DomainError("partition_log_closed: x must be nonzero");
    const VectorXd ax = ctx.matrix() * x;
    const double a = ax.norm();
    const VectorXd& y = ctx.observation();
    const double p = static_cast<double>(ctx.p());
    const double half_y2 = 0.5 * y.squaredNorm();

    if (detail::in_kernel(ctx, a, l1))
        return specfun::log_gamma(p) - p * std::log(l1) - half_y2;

    const double omega = (l1 - ax.dot(y)) / a;
    return -half_y2 - p * std::log(a) + specfun::log_weighted_cylinder(p, omega, spec);
}

/// Quasi-norm ||x||_c = Z_p(x)^{-1/p}; 0 at the origin by convention.
inline double quasi_norm(const GeometryContext& ctx, const Eigen::Ref<const VectorXd>& x) {
    detail::check_length(ctx, x, "quasi_norm");
    if (x.lpNorm<1>() == 0.0) return 0.0;
    return std::exp(-partition_log_closed(ctx, x) / static_cast<double>(ctx.p()));
}

/// Largest r such that [0, r] s stays inside the unit ball of ||.||_c,
/// i.e. Z_p(s)^{1/p}; the point r s lies on the contour.
inline double max_radius(const GeometryContext& ctx, const Direction& s) {
    if (s.tag() != NormTag::l1)
        throw DomainError("max_radius: direction must be l1-normalized");
    return std::exp(partition_log_closed(ctx, s.vec()) / static_cast<double>(ctx.p()));
}

/// Monte Carlo estimate of the full partition function.
struct McEstimate {
    double estimate;
    double std_error;
};

/// Z = 2^p E_Laplace[ exp(-||Ax - y||^2 / 2) ] by importance sampling from
/// the prior. Work is split into fixed-size chunks with sub-stream seeds,
/// so the result is a pure function of (ctx, n_samples, seed) no matter how
/// many threads execute the chunks.
inline McEstimate partition_total_mc(const GeometryContext& ctx, std::int64_t n_samples,
                                     std::uint64_t seed, int threads = 1) {
    if (n_samples < 1) throw DomainError("partition_total_mc: n_samples must be >= 1");
    constexpr std::int64_t kChunk = 1 << 16;
    const std::int64_t n_chunks = (n_samples + kChunk - 1) / kChunk;

    auto run_chunk = [&](std::int64_t chunk) {
        const std::int64_t begin = chunk * kChunk;
        const std::int64_t count = std::min(kChunk, n_samples - begin);
        RngStream rng(derive_seed(seed, static_cast<std::uint64_t>(chunk)));
        VectorXd x(ctx.p());
        double sum = 0.0, sum_sq = 0.0;
        for (std::int64_t i = 0; i < count; ++i) {
            for (Eigen::Index j = 0; j < ctx.p(); ++j) x[j] = rng.laplace();
            const double w = std::exp(-0.5 * (ctx.matrix() * x - ctx.observation()).squaredNorm());
            sum += w;
            sum_sq += w * w;
        }
        return std::pair<double, double>(sum, sum_sq);
    };

    double sum = 0.0, sum_sq = 0.0;
    if (threads <= 1) {
        for (std::int64_t c = 0; c < n_chunks; ++c) {
            auto [s, s2] = run_chunk(c);
            sum += s;
            sum_sq += s2;
        }
    } else {
        std::vector<std::future<std::pair<double, double>>> futures;
        futures.reserve(static_cast<std::size_t>(n_chunks));
        for (std::int64_t c = 0; c < n_chunks; ++c)
            futures.push_back(std::async(std::launch::async, run_chunk, c));
        for (auto& fut : futures) {
            auto [s, s2] = fut.get();
            sum += s;
            sum_sq += s2;
        }
    }

    const double n = static_cast<double>(n_samples);
    const double scale = std::ldexp(1.0, static_cast<int>(ctx.p()));
    const double mean = sum / n;
    double variance = 0.0;
    if (n_samples > 1) variance = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    return {scale * mean, scale * std::sqrt(variance / n)};
}

}  // namespace blasso::geometry
