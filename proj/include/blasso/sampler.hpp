#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "blasso/concentration.hpp"
#include "blasso/geometry.hpp"
#include "blasso/radial.hpp"
#include "blasso/rng.hpp"

namespace blasso::sampler {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using geometry::Direction;
using geometry::GeometryContext;

struct Proposal {
    enum class Kind { independent_laplace, random_walk };
    Kind kind = Kind::independent_laplace;
    double variance = 0.5;  // per-coordinate, random walk only
};

/// Output of one Metropolis-Hastings run. Column t of `samples` is the
/// chain state x^(t); the chain has samples.cols() - 1 transition attempts.
struct ChainResult {
    MatrixXd samples;
    std::int64_t accepted = 0;
    Proposal proposal;
    std::uint64_t seed = 0;

    std::int64_t length() const { return samples.cols(); }
    double acceptance_rate() const {
        return static_cast<double>(accepted) /
               static_cast<double>(std::max<std::int64_t>(1, samples.cols() - 1));
    }
};

/// Unnormalized log density of the target, -f(x).
inline double log_target(const GeometryContext& ctx, const Eigen::Ref<const VectorXd>& x) {
    return -geometry::objective(ctx, x);
}

/// Independence sampler with the standard Laplace proposal. The l1 terms of
/// target and proposal cancel, so the acceptance ratio reduces to the
/// quadratic parts: min(1, exp(-||Ax'-y||^2/2 + ||Ax-y||^2/2)). The initial
/// state is a proposal draw.
inline ChainResult run_independent_sampler(const GeometryContext& ctx,
                                           std::int64_t n_iterations, std::uint64_t seed) {
    if (n_iterations < 1) throw DomainError("run_independent_sampler: need n_iterations >= 1");
    RngStream rng(seed);
    ChainResult chain;
    chain.proposal = {Proposal::Kind::independent_laplace, 0.0};
    chain.seed = seed;
    chain.samples.resize(ctx.p(), n_iterations);

    VectorXd x(ctx.p());
    for (Eigen::Index j = 0; j < ctx.p(); ++j) x[j] = rng.laplace();
    double quad = 0.5 * (ctx.matrix() * x - ctx.observation()).squaredNorm();
    chain.samples.col(0) = x;

    VectorXd candidate(ctx.p());
    for (std::int64_t t = 1; t < n_iterations; ++t) {
        for (Eigen::Index j = 0; j < ctx.p(); ++j) candidate[j] = rng.laplace();
        const double quad_new =
            0.5 * (ctx.matrix() * candidate - ctx.observation()).squaredNorm();
        const double log_ratio = quad - quad_new;
        if (std::log(rng.uniform01()) < log_ratio) {
            x = candidate;
            quad = quad_new;
            ++chain.accepted;
        }
        chain.samples.col(t) = x;
    }
    return chain;
}

/// Symmetric random-walk Metropolis with N(0, variance I_p) increments,
/// started at the origin.
inline ChainResult run_random_walk(const GeometryContext& ctx, std::int64_t n_iterations,
                                   double step_variance, std::uint64_t seed) {
    if (n_iterations < 1) throw DomainError("run_random_walk: need n_iterations >= 1");
    if (!(step_variance > 0.0)) throw DomainError("run_random_walk: variance must be > 0");
    RngStream rng(seed);
    ChainResult chain;
    chain.proposal = {Proposal::Kind::random_walk, step_variance};
    chain.seed = seed;
    chain.samples.resize(ctx.p(), n_iterations);

    VectorXd x = VectorXd::Zero(ctx.p());
    double f_cur = geometry::objective(ctx, x);
    chain.samples.col(0) = x;

    const double sigma = std::sqrt(step_variance);
    VectorXd candidate(ctx.p());
    for (std::int64_t t = 1; t < n_iterations; ++t) {
        for (Eigen::Index j = 0; j < ctx.p(); ++j) candidate[j] = x[j] + sigma * rng.normal();
        const double f_new = geometry::objective(ctx, candidate);
        if (std::log(rng.uniform01()) < f_cur - f_new) {
            x = candidate;
            f_cur = f_new;
            ++chain.accepted;
        }
        chain.samples.col(t) = x;
    }
    return chain;
}

/// Arithmetic mean of the states after burn_in.
inline VectorXd chain_mean(const ChainResult& chain, std::int64_t burn_in) {
    if (burn_in < 0 || burn_in >= chain.length())
        throw DomainError("chain_mean: empty post-burn-in window");
    return chain.samples.rightCols(chain.length() - burn_in).rowwise().mean();
}

struct DiagnosticRecord {
    std::int64_t t;
    double radius_observed;   // ||x^(t)||_2
    double radius_reference;  // r(theta^(t)); +inf on kernel directions
    bool satisfied;
};

struct DiagnosticSeries {
    std::vector<DiagnosticRecord> records;
    double q = 0.0;
    std::optional<std::int64_t> first_passage;
    std::int64_t kernel_events = 0;  // states judged by the kernel convention

    double satisfied_fraction() const {
        if (records.empty()) return 0.0;
        std::int64_t count = 0;
        for (const auto& rec : records) count += rec.satisfied ? 1 : 0;
        return static_cast<double>(count) / static_cast<double>(records.size());
    }
};

/// Per-state convergence criterion ||x^(t)||_2 <= q r(theta^(t)) with
/// theta^(t) the l2-normalized state. States at the origin satisfy the
/// criterion by convention, as do states whose direction lies in Ker(A)
/// (the radial scale is unbounded there); those are counted in
/// kernel_events for audit.
inline DiagnosticSeries diagnose(const GeometryContext& ctx, const ChainResult& chain,
                                 double q) {
    if (!(q > 0.0)) throw DomainError("diagnose: q must be > 0");
    if (chain.length() < 1) throw DomainError("diagnose: empty chain");
    if (ctx.p() < 2) throw DomainError("diagnose: requires p >= 2");
    constexpr double kInf = std::numeric_limits<double>::infinity();

    DiagnosticSeries series;
    series.q = q;
    series.records.reserve(static_cast<std::size_t>(chain.length()));
    for (std::int64_t t = 0; t < chain.length(); ++t) {
        const VectorXd state = chain.samples.col(t);
        DiagnosticRecord rec;
        rec.t = t;
        rec.radius_observed = state.norm();
        if (rec.radius_observed <= 1e-12) {
            rec.radius_reference = kInf;
            rec.satisfied = true;
            ++series.kernel_events;
        } else {
            const VectorXd theta = state / rec.radius_observed;
            const double a = (ctx.matrix() * theta).norm();
            if (geometry::detail::in_kernel(ctx, a, theta.lpNorm<1>()) || a == 0.0) {
                rec.radius_reference = kInf;
                rec.satisfied = true;
                ++series.kernel_events;
            } else {
                rec.radius_reference =
                    concentration::concentration_radius(ctx, Direction(theta, geometry::NormTag::l2));
                rec.satisfied = rec.radius_observed <= q * rec.radius_reference;
            }
        }
        series.records.push_back(rec);
    }

    std::int64_t last_violation = -1;
    for (std::int64_t t = chain.length() - 1; t >= 0; --t) {
        if (!series.records[static_cast<std::size_t>(t)].satisfied) {
            last_violation = t;
            break;
        }
    }
    if (last_violation < 0)
        series.first_passage = 0;
    else if (last_violation + 1 < chain.length())
        series.first_passage = last_violation + 1;
    return series;
}

/// Uniform-ergodicity rate (1 - Z / 2^p)^t of the independence sampler.
inline double ergodicity_rate(const GeometryContext& ctx, double z_estimate,
                              std::int64_t t) {
    if (t < 0) throw DomainError("ergodicity_rate: t must be >= 0");
    const double cap = std::ldexp(1.0, static_cast<int>(ctx.p()));
    if (!(z_estimate > 0.0) || z_estimate > cap)
        throw DomainError("ergodicity_rate: need 0 < Z <= 2^p");
    return std::pow(1.0 - z_estimate / cap, static_cast<double>(t));
}

/// Exact radial draws along s; see radial::sample_radial_exact.
inline std::vector<double> radial_exact_sampler(const GeometryContext& ctx, const Direction& s,
                                                std::int64_t n_samples, std::uint64_t seed) {
    return radial::sample_radial_exact(ctx, s, n_samples, seed);
}

/// The random design of the experiments: entries i.i.d. uniform on
/// {+1/sqrt(n), -1/sqrt(n)}.
inline MatrixXd bernoulli_design(Eigen::Index n_rows, Eigen::Index p_cols, std::uint64_t seed) {
    if (n_rows < 1 || p_cols < 1) throw DimensionError("bernoulli_design: bad shape");
    RngStream rng(derive_seed(seed, 0x6d617472ULL));
    const double magnitude = 1.0 / std::sqrt(static_cast<double>(n_rows));
    MatrixXd design(n_rows, p_cols);
    for (Eigen::Index i = 0; i < n_rows; ++i)
        for (Eigen::Index j = 0; j < p_cols; ++j)
            design(i, j) = rng.uniform01() < 0.5 ? magnitude : -magnitude;
    return design;
}

}  // namespace blasso::sampler
