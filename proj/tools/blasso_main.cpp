// Command-line front end: every library computation behind a subcommand,
// with CSV/JSON output that is a pure function of flags and seeds.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blasso/cli.hpp"

namespace {

using blasso::cli::McmcArgs;
using blasso::cli::PartitionArgs;
using blasso::cli::SourceArgs;

void add_source_options(CLI::App* cmd, SourceArgs& args) {
    cmd->add_option("--p", args.p, "signal dimension (with --bernoulli-seed)");
    cmd->add_option("--n", args.n, "observation dimension (with --bernoulli-seed)");
    cmd->add_option("--matrix", args.matrix_file, "design matrix CSV, one row per line");
    auto* seed = cmd->add_option("--bernoulli-seed", args.bernoulli_seed,
                                 "generate A with +-1/sqrt(n) entries from this seed");
    seed->excludes("--matrix");
    cmd->add_option("--y", args.y_file, "observation file, one value per line");
    cmd->add_flag("--zero-y", args.zero_y, "use y = 0")->excludes("--y");
}

// Writes to the path, or to the fallback stream when path is "-".
class OutputTarget {
public:
    OutputTarget(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (path != "-") {
            file_.open(path);
            if (!file_) throw blasso::IoError("cannot open output file '" + path + "'");
            stream_ = &file_;
        }
    }
    std::ostream& get() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian LASSO posterior geometry, concentration bounds and MCMC diagnostics"};
    app.require_subcommand(1);

    // pqp
    int pqp_p = 7;
    std::vector<double> pqp_q;
    std::string pqp_out = "-";
    auto* pqp = app.add_subcommand("pqp", "containment probability table P(q,p)");
    pqp->add_option("--p", pqp_p, "dimension p (>= 2)");
    pqp->add_option("--q", pqp_q, "q values (default 2 2.5 3 3.5 4 4.5 5)");
    pqp->add_option("--out", pqp_out, "output CSV path ('-' = stdout)");

    // density-profile
    SourceArgs dp_source;
    std::string dp_s;
    double dp_rmin = 0.1, dp_rmax = 10.0;
    int dp_steps = 200;
    std::string dp_out = "-";
    auto* dp = app.add_subcommand("density-profile", "radial density c(r,s) on a grid");
    add_source_options(dp, dp_source);
    dp->add_option("--s", dp_s, "direction, comma separated")->required();
    dp->add_option("--r-min", dp_rmin, "grid start");
    dp->add_option("--r-max", dp_rmax, "grid end");
    dp->add_option("--steps", dp_steps, "number of grid intervals");
    dp->add_option("--out", dp_out, "output CSV path ('-' = stdout)");

    // contour2d
    double c2_a1 = 1.0, c2_a2 = 1.0;
    int c2_grid = 64;
    std::string c2_out = "-";
    auto* c2 = app.add_subcommand("contour2d", "contour of B((a1,a2), 0) for p=2, n=1");
    c2->add_option("--a1", c2_a1, "first matrix entry")->required();
    c2->add_option("--a2", c2_a2, "second matrix entry")->required();
    c2->add_option("--n-grid", c2_grid, "grid size in b");
    c2->add_option("--out", c2_out, "output CSV path ('-' = stdout)");

    // mcmc
    McmcArgs mc;
    std::string mc_sampler = "rw";
    std::string mc_csv = "mcmc_diagnostics.csv";
    std::string mc_json = "mcmc_summary.json";
    auto* mcmc = app.add_subcommand("mcmc", "seeded Metropolis-Hastings run with diagnostics");
    add_source_options(mcmc, mc.source);
    mcmc->add_option("--iterations", mc.iterations, "chain length");
    mcmc->add_option("--q", mc.q, "diagnostic multiplier (default 5)");
    mcmc->add_option("--seed", mc.seed, "chain seed");
    mcmc->add_option("--sampler", mc_sampler, "is | rw")->check(CLI::IsMember({"is", "rw"}));
    mcmc->add_option("--rw-variance", mc.rw_variance, "random walk step variance");
    mcmc->add_option("--burn-in", mc.burn_in, "samples dropped from the mean");
    mcmc->add_option("--z-samples", mc.z_samples, "MC samples for the Z estimate (is only)");
    mcmc->add_option("--threads", mc.threads, "worker threads for the Z estimate");
    mcmc->add_option("--csv", mc_csv, "diagnostics CSV path ('-' = stdout)");
    mcmc->add_option("--json", mc_json, "summary JSON path ('-' = stdout)");

    // lasso
    std::string la_matrix, la_y;
    bool la_accel = false;
    double la_tol = 1e-10;
    int la_maxit = 200000;
    std::string la_out = "-";
    auto* la = app.add_subcommand("lasso", "proximal-gradient lasso point");
    la->add_option("--matrix", la_matrix, "design matrix CSV")->required();
    la->add_option("--y", la_y, "observation file")->required();
    la->add_flag("--accelerated", la_accel, "use FISTA momentum");
    la->add_option("--tolerance", la_tol, "optimality residual target");
    la->add_option("--max-iterations", la_maxit, "iteration cap");
    la->add_option("--out", la_out, "output JSON path ('-' = stdout)");

    // partition
    PartitionArgs pt;
    std::string pt_x;
    std::string pt_out = "-";
    auto* part = app.add_subcommand("partition", "Monte Carlo partition function estimate");
    add_source_options(part, pt.source);
    part->add_option("--samples", pt.samples, "Monte Carlo sample count");
    part->add_option("--seed", pt.seed, "Monte Carlo seed");
    part->add_option("--threads", pt.threads, "worker threads");
    part->add_option("--x", pt_x, "optional direction, comma separated");
    part->add_option("--out", pt_out, "output JSON path ('-' = stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*pqp) {
            if (pqp_q.empty()) pqp_q = {2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
            OutputTarget out(pqp_out, std::cout);
            blasso::cli::run_pqp(pqp_p, pqp_q, out.get());
        } else if (*dp) {
            OutputTarget out(dp_out, std::cout);
            blasso::cli::run_density_profile(blasso::cli::make_context(dp_source),
                                             blasso::io::parse_vector_csv(dp_s), dp_rmin,
                                             dp_rmax, dp_steps, out.get());
        } else if (*c2) {
            OutputTarget out(c2_out, std::cout);
            blasso::cli::run_contour2d(c2_a1, c2_a2, c2_grid, out.get());
        } else if (*mcmc) {
            mc.random_walk = mc_sampler == "rw";
            OutputTarget csv(mc_csv, std::cout);
            OutputTarget summary(mc_json, std::cout);
            blasso::cli::run_mcmc(mc, csv.get(), summary.get());
        } else if (*la) {
            OutputTarget out(la_out, std::cout);
            blasso::cli::run_lasso(la_matrix, la_y, la_accel, la_tol, la_maxit, out.get());
        } else if (*part) {
            if (!pt_x.empty()) pt.x = blasso::io::parse_vector_csv(pt_x);
            OutputTarget out(pt_out, std::cout);
            blasso::cli::run_partition(pt, out.get());
        }
    } catch (const blasso::cli::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const blasso::DimensionError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const blasso::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
