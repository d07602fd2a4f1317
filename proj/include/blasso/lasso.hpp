#pragma once

#include <cmath>
#include <optional>

#include "blasso/geometry.hpp"

namespace blasso::lasso {

using Eigen::VectorXd;
using geometry::GeometryContext;

struct SolverConfig {
    int max_iterations = 100000;
    double tolerance = 1e-10;
    std::optional<double> step_size;  // empty = 1 / lambda_max(A^T A)
};

struct LassoResult {
    VectorXd point;
    double objective_value;
    int iterations;
    bool converged;
    double optimality_residual;
};

/// True iff 0 minimizes f, i.e. ||A^T y||_inf <= 1 (non-strict boundary).
inline bool is_zero_lasso(const GeometryContext& ctx) {
    return ctx.At_y().lpNorm<Eigen::Infinity>() <= 1.0 + 1e-12;
}

/// Soft-threshold of (x - step * gradient) at level step.
inline VectorXd proximal_step(const Eigen::Ref<const VectorXd>& x,
                              const Eigen::Ref<const VectorXd>& gradient, double step) {
    if (x.size() != gradient.size())
        throw DimensionError("proximal_step: mismatched lengths");
    if (!(step > 0.0)) throw DomainError("proximal_step: step must be > 0");
    VectorXd out(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double v = x[j] - step * gradient[j];
        out[j] = std::copysign(std::max(std::abs(v) - step, 0.0), v);
    }
    return out;
}

/// max_j dist(<A_j, A x - y>, -subdiff |x_j|): the certificate that x is a
/// minimizer, zero exactly at solutions of the optimality conditions.
inline double optimality_residual(const GeometryContext& ctx,
                                  const Eigen::Ref<const VectorXd>& x) {
    const VectorXd g = ctx.matrix().transpose() * (ctx.matrix() * x - ctx.observation());
    double worst = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        double r;
        if (x[j] != 0.0)
            r = std::abs(g[j] + (x[j] > 0.0 ? 1.0 : -1.0));
        else
            r = std::max(0.0, std::abs(g[j]) - 1.0);
        worst = std::max(worst, r);
    }
    return worst;
}

/// lambda_max(A^T A) by power iteration, converged to 1e-13 relative.
inline double lipschitz_constant(const GeometryContext& ctx) {
    const Eigen::Index p = ctx.p();
    VectorXd v = VectorXd::LinSpaced(p, 1.0, 1.0 + 0.001 * static_cast<double>(p - 1));
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 20000; ++it) {
        VectorXd w = ctx.matrix().transpose() * (ctx.matrix() * v);
        const double next = v.dot(w);
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        v = w / norm;
        if (std::abs(next - lambda) <= 1e-13 * std::max(std::abs(next), 1e-30)) return next;
        lambda = next;
    }
    return lambda;
}

/// Proximal gradient minimization of f from x = 0; plain ISTA or, with
/// accelerated = true, FISTA momentum. Zero initialization makes the
/// zero-lasso regime exact: when ||A^T y||_inf <= 1 the first prox step is
/// a fixed point. Convergence is certified by the subdifferential residual.
inline LassoResult solve(const GeometryContext& ctx, const SolverConfig& cfg,
                         bool accelerated) {
    if (cfg.max_iterations < 1) throw DomainError("solve: max_iterations must be >= 1");
    if (!(cfg.tolerance > 0.0)) throw DomainError("solve: tolerance must be > 0");
    double step;
    if (cfg.step_size) {
        if (!(*cfg.step_size > 0.0)) throw DomainError("solve: step_size must be > 0");
        step = *cfg.step_size;
    } else {
        const double lipschitz = lipschitz_constant(ctx);
        step = lipschitz > 0.0 ? 1.0 / (lipschitz * (1.0 + 1e-9)) : 1.0;
    }

    VectorXd x = VectorXd::Zero(ctx.p());
    VectorXd momentum = x;
    double t_k = 1.0;
    double f_prev = geometry::objective(ctx, x);
    VectorXd best = x;
    double f_best = f_prev;

    int iterations = 0;
    double residual = optimality_residual(ctx, x);
    while (residual > cfg.tolerance && iterations < cfg.max_iterations) {
        const VectorXd& base = accelerated ? momentum : x;
        const VectorXd gradient =
            ctx.matrix().transpose() * (ctx.matrix() * base - ctx.observation());
        VectorXd next = proximal_step(base, gradient, step);
        if (accelerated) {
            // restart the momentum whenever it points against the step
            if ((momentum - next).dot(next - x) > 0.0) {
                t_k = 1.0;
                momentum = next;
            } else {
                const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_k * t_k));
                momentum = next + ((t_k - 1.0) / t_next) * (next - x);
                t_k = t_next;
            }
        }
        const double f_next = geometry::objective(ctx, next);
        const double dx = (next - x).norm();
        x = std::move(next);
        ++iterations;
        if (f_next < f_best) {
            f_best = f_next;
            best = x;
        }
        residual = optimality_residual(ctx, x);
        // plateau exit, only once the certificate already holds
        const bool plateau = dx <= cfg.tolerance &&
                             std::abs(f_prev - f_next) <=
                                 cfg.tolerance * std::max(1.0, std::abs(f_next)) &&
                             residual <= 10.0 * cfg.tolerance;
        f_prev = f_next;
        if (plateau) break;
    }

    LassoResult result;
    result.converged = residual <= 10.0 * cfg.tolerance;
    if (!result.converged && f_best < f_prev) {
        result.point = best;
        result.objective_value = f_best;
        result.optimality_residual = optimality_residual(ctx, best);
    } else {
        result.point = x;
        result.objective_value = f_prev;
        result.optimality_residual = residual;
    }
    result.iterations = iterations;
    return result;
}

}  // namespace blasso::lasso
