#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "blasso/concentration.hpp"
#include "blasso/contour2d.hpp"
#include "blasso/geometry.hpp"
#include "blasso/io.hpp"
#include "blasso/lasso.hpp"
#include "blasso/sampler.hpp"

namespace blasso::cli {

using geometry::GeometryContext;
using nlohmann::json;

/// Bad flag combination or value; maps to exit code 2.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Where the experiment's (A, y) pair comes from.
struct SourceArgs {
    int p = 0;
    int n = 0;
    std::string matrix_file;                      // CSV, one row per line
    std::optional<std::uint64_t> bernoulli_seed;  // +-1/sqrt(n) design
    std::string y_file;                           // one value per line
    bool zero_y = false;
};

inline GeometryContext make_context(const SourceArgs& args) {
    Eigen::MatrixXd design;
    if (!args.matrix_file.empty()) {
        design = io::read_matrix_csv(args.matrix_file);
        if (args.p > 0 && design.cols() != args.p)
            throw UsageError("--p disagrees with the matrix file column count");
        if (args.n > 0 && design.rows() != args.n)
            throw UsageError("--n disagrees with the matrix file row count");
    } else if (args.bernoulli_seed) {
        if (args.p < 1 || args.n < 1)
            throw UsageError("--bernoulli-seed requires --p >= 1 and --n >= 1");
        design = sampler::bernoulli_design(args.n, args.p, *args.bernoulli_seed);
    } else {
        throw UsageError("need either --matrix or --bernoulli-seed");
    }

    Eigen::VectorXd observation;
    if (!args.y_file.empty()) {
        observation = io::read_vector_lines(args.y_file);
        if (observation.size() != design.rows())
            throw UsageError("--y length disagrees with the matrix row count");
    } else if (args.zero_y) {
        observation = Eigen::VectorXd::Zero(design.rows());
    } else {
        throw UsageError("need either --y or --zero-y");
    }
    return GeometryContext(std::move(design), std::move(observation));
}

/// `pqp`: the containment table. containment_probability is printed at 4
/// decimals (the table-reproduction column); the raw bounds at 17 digits.
inline void run_pqp(int p, const std::vector<double>& q_values, std::ostream& out) {
    if (p < 2) throw UsageError("pqp: --p must be >= 2");
    if (q_values.empty()) throw UsageError("pqp: empty q list");
    out << "q,tail_bound,containment_probability,natalini_bound\n";
    for (const double q : q_values) {
        const auto report = concentration::tail_bound(q, p);
        out << io::format_g17(q) << ',' << io::format_g17(report.tail_bound) << ','
            << io::format_f4(report.containment_probability) << ',';
        if (report.natalini_bound) out << io::format_g17(*report.natalini_bound);
        out << '\n';
    }
}

/// `density-profile`: tabulates the radial density along s on an inclusive
/// grid of `steps` intervals, normalized by the quadrature partition value.
/// Mode and concentration radius go into leading '#' comment lines.
inline void run_density_profile(const GeometryContext& ctx,
                                const Eigen::Ref<const Eigen::VectorXd>& s, double r_min,
                                double r_max, int steps, std::ostream& out) {
    if (s.size() != ctx.p()) throw UsageError("density-profile: --s length must equal p");
    if (s.lpNorm<1>() <= 0.0) throw UsageError("density-profile: s must be nonzero");
    if (steps < 1) throw UsageError("density-profile: --steps must be >= 1");
    if (!(r_min >= 0.0) || !(r_max > r_min))
        throw UsageError("density-profile: need 0 <= r-min < r-max");

    const double normalization = geometry::partition_radial(ctx, s);
    const double mode = geometry::radial_density_mode(ctx, s);
    out << "# mode_radius = " << io::format_g17(mode) << '\n';
    const double a = (ctx.matrix() * s).norm();
    if (ctx.p() >= 2 && !(geometry::detail::in_kernel(ctx, a, s.lpNorm<1>()) || a == 0.0)) {
        // r(s) for the direction as given (the scale of s matters here).
        const double omega = geometry::omega_lasso(ctx, s);
        const double pm1 = static_cast<double>(ctx.p() - 1);
        const double radius = 0.5 * (-omega + std::sqrt(omega * omega + 4.0 * pm1)) / a;
        out << "# concentration_radius = " << io::format_g17(radius) << '\n';
    } else {
        out << "# warning: direction lies in Ker(A); concentration radius undefined\n";
    }

    out << "r,c_unnormalized,c_normalized\n";
    const double width = (r_max - r_min) / static_cast<double>(steps);
    const double pm1 = static_cast<double>(ctx.p() - 1);
    for (int i = 0; i <= steps; ++i) {
        const double r = r_min + static_cast<double>(i) * width;
        const double value =
            std::exp(-geometry::objective(ctx, (r * s).eval())) * std::pow(r, pm1);
        out << io::format_g17(r) << ',' << io::format_g17(value) << ','
            << io::format_g17(value / normalization) << '\n';
    }
}

/// `contour2d`: angle-ordered contour points with provenance.
inline void run_contour2d(double a1, double a2, int n_grid, std::ostream& out) {
    if (std::abs(a1) + std::abs(a2) == 0.0)
        throw UsageError("contour2d: (a1, a2) must be nonzero");
    if (n_grid < 1) throw UsageError("contour2d: --n-grid must be >= 1");
    const auto points = contour2d::contour_points(a1, a2, n_grid);
    out << "x1,x2,direction_b,provenance\n";
    for (const auto& point : points) {
        const char* source = point.source == contour2d::ContourPoint::Source::kernel
                                 ? "kernel"
                                 : point.source == contour2d::ContourPoint::Source::omega_extremal
                                       ? "omega_extremal"
                                       : "solved_b";
        out << io::format_g17(point.x1) << ',' << io::format_g17(point.x2) << ','
            << io::format_g17(point.direction_b) << ',' << source << '\n';
    }
}

struct McmcArgs {
    SourceArgs source;
    std::int64_t iterations = 100000;
    double q = 5.0;
    std::uint64_t seed = 12345;
    bool random_walk = true;
    double rw_variance = 0.5;
    std::int64_t burn_in = 0;
    std::int64_t z_samples = 200000;  // MC sample count for the Z estimate (IS only)
    int threads = 1;
};

/// `mcmc`: runs the configured sampler, streams the per-iteration
/// diagnostic CSV and writes a JSON summary.
inline void run_mcmc(const McmcArgs& args, std::ostream& csv_out, std::ostream& json_out) {
    if (args.iterations < 1) throw UsageError("mcmc: --iterations must be >= 1");
    if (!(args.q > 0.0)) throw UsageError("mcmc: --q must be > 0");
    const GeometryContext ctx = make_context(args.source);
    const sampler::ChainResult chain =
        args.random_walk
            ? sampler::run_random_walk(ctx, args.iterations, args.rw_variance, args.seed)
            : sampler::run_independent_sampler(ctx, args.iterations, args.seed);
    const sampler::DiagnosticSeries series = sampler::diagnose(ctx, chain, args.q);

    csv_out << "t,norm2,q_times_radius,satisfied\n";
    for (const auto& rec : series.records)
        csv_out << rec.t << ',' << io::format_g17(rec.radius_observed) << ','
                << io::format_g17(args.q * rec.radius_reference) << ','
                << (rec.satisfied ? 1 : 0) << '\n';

    const Eigen::VectorXd mean = sampler::chain_mean(chain, args.burn_in);
    json summary;
    summary["sampler"] = args.random_walk ? "rw" : "is";
    summary["p"] = ctx.p();
    summary["n"] = ctx.n();
    summary["iterations"] = args.iterations;
    summary["seed"] = args.seed;
    summary["q"] = args.q;
    summary["burn_in"] = args.burn_in;
    summary["accepted"] = chain.accepted;
    summary["acceptance_rate"] = chain.acceptance_rate();
    if (series.first_passage)
        summary["first_passage"] = *series.first_passage;
    else
        summary["first_passage"] = nullptr;
    summary["satisfied_fraction"] = series.satisfied_fraction();
    summary["kernel_events"] = series.kernel_events;
    summary["mean_estimator"] = std::vector<double>(mean.data(), mean.data() + mean.size());
    summary["mean_norm"] = mean.norm();
    summary["matrix_hash"] = io::matrix_hash_hex(ctx.matrix());
    if (args.random_walk) {
        summary["rw_variance"] = args.rw_variance;
    } else {
        const auto z = geometry::partition_total_mc(ctx, args.z_samples,
                                                    derive_seed(args.seed, 0x7a657374ULL),
                                                    args.threads);
        summary["z_estimate"] = z.estimate;
        summary["z_std_error"] = z.std_error;
        const double cap = std::ldexp(1.0, static_cast<int>(ctx.p()));
        if (z.estimate > 0.0 && z.estimate <= cap)
            summary["ergodicity_rate_per_step"] = sampler::ergodicity_rate(ctx, z.estimate, 1);
        else
            summary["ergodicity_rate_per_step"] = nullptr;
    }
    json_out << summary.dump(2) << '\n';
}

/// `lasso`: solves for a lasso point and reports the zero-lasso
/// characterization; the two answers must agree.
inline void run_lasso(const std::string& matrix_file, const std::string& y_file,
                      bool accelerated, double tolerance, int max_iterations,
                      std::ostream& out) {
    GeometryContext ctx(io::read_matrix_csv(matrix_file), io::read_vector_lines(y_file));
    lasso::SolverConfig config;
    config.tolerance = tolerance;
    config.max_iterations = max_iterations;
    const lasso::LassoResult result = lasso::solve(ctx, config, accelerated);
    const bool zero_flag = lasso::is_zero_lasso(ctx);
    if (zero_flag && result.converged && result.point.norm() > 100.0 * tolerance)
        throw NumericalError("lasso: solver disagrees with the zero-lasso characterization");

    json report;
    report["lasso_point"] =
        std::vector<double>(result.point.data(), result.point.data() + result.point.size());
    report["objective"] = result.objective_value;
    report["iterations"] = result.iterations;
    report["converged"] = result.converged;
    report["optimality_residual"] = result.optimality_residual;
    report["zero_lasso"] = zero_flag;
    report["point_norm2"] = result.point.norm();
    report["accelerated"] = accelerated;
    report["matrix_hash"] = io::matrix_hash_hex(ctx.matrix());
    out << report.dump(2) << '\n';
}

struct PartitionArgs {
    SourceArgs source;
    std::int64_t samples = 1000000;
    std::uint64_t seed = 12345;
    int threads = 1;
    std::optional<Eigen::VectorXd> x;  // direction to evaluate Z_p(x) at
};

/// `partition`: Monte Carlo Z estimate plus, optionally, the directional
/// partition value along --x by both routes.
inline void run_partition(const PartitionArgs& args, std::ostream& out) {
    if (args.samples < 1) throw UsageError("partition: --samples must be >= 1");
    const GeometryContext ctx = make_context(args.source);
    const auto z = geometry::partition_total_mc(ctx, args.samples, args.seed, args.threads);
    json report;
    report["z_estimate"] = z.estimate;
    report["z_std_error"] = z.std_error;
    report["samples"] = args.samples;
    report["seed"] = args.seed;
    report["p"] = ctx.p();
    report["n"] = ctx.n();
    report["two_to_p"] = std::ldexp(1.0, static_cast<int>(ctx.p()));
    report["matrix_hash"] = io::matrix_hash_hex(ctx.matrix());
    const double cap = std::ldexp(1.0, static_cast<int>(ctx.p()));
    if (z.estimate > 0.0 && z.estimate <= cap)
        report["ergodicity_rate_per_step"] = sampler::ergodicity_rate(ctx, z.estimate, 1);
    else
        report["ergodicity_rate_per_step"] = nullptr;
    if (args.x) {
        if (args.x->size() != ctx.p()) throw UsageError("partition: --x length must equal p");
        report["x"] = std::vector<double>(args.x->data(), args.x->data() + args.x->size());
        report["log_partition_closed"] = geometry::partition_log_closed(ctx, *args.x);
        report["partition_radial"] = geometry::partition_radial(ctx, *args.x);
        report["quasi_norm"] = geometry::quasi_norm(ctx, *args.x);
    }
    out << report.dump(2) << '\n';
}

}  // namespace blasso::cli
