#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace pcglasso;
using namespace pcglasso::cli;

namespace {

void add_path_options(CLI::App* app, PathOptions& o) {
    app->add_option("--rho-count", o.rho_count, "Number of rho values including 0")->capture_default_str();
    app->add_option("--rho-min-ratio", o.rho_min_ratio, "Smallest positive rho as a fraction of rho_max")
        ->capture_default_str();
    app->add_option("--gamma", o.gamma, "EBIC gamma")->capture_default_str();
    app->add_option("--epsilon", o.epsilon, "Convergence threshold")->capture_default_str();
    app->add_option("--max-sweeps", o.max_sweeps, "Sweep limit per rho")->capture_default_str();
    app->add_option("--seed", o.seed, "Seed for the block order and random draws")->capture_default_str();
}

void add_input_options(CLI::App* app, InputSpec& in) {
    app->add_option("--input", in.data, "Data CSV: rows are observations, optional header");
    app->add_option("--cov", in.cov, "Covariance matrix CSV (headerless) instead of data");
    app->add_option("--n", in.n, "Sample size for --cov");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scale-invariant sparse precision matrix estimation with an L1 penalty on partial correlations"};
    app.require_subcommand(1);

    PathOptions opts;
    InputSpec input;
    std::string output_dir = ".";
    std::string truth;
    std::string train, test;
    std::string scenario = "star";
    SimulationSpec sim;
    bool identity = false;

    auto* fit = app.add_subcommand("fit", "Fit a path and write BIC and EBIC selected estimates");
    add_input_options(fit, input);
    fit->add_option("--output-dir", output_dir, "Directory for output files")->capture_default_str();
    add_path_options(fit, opts);

    auto* path = app.add_subcommand("path", "Write the partial correlation path as CSV and SVG");
    add_input_options(path, input);
    path->add_option("--truth", truth, "True precision matrix CSV to highlight its edges");
    path->add_option("--output-dir", output_dir, "Directory for output files")->capture_default_str();
    add_path_options(path, opts);

    auto* simulate = app.add_subcommand("simulate", "Simulation study on a synthetic scenario");
    simulate->add_option("--scenario", scenario, "star, hub, ar2, random or all")->capture_default_str();
    simulate->add_option("--p", sim.p, "Dimension")->capture_default_str();
    simulate->add_option("--n", sim.n, "Sample size")->capture_default_str();
    simulate->add_option("--reps", sim.reps, "Number of replicates")->capture_default_str();
    simulate->add_option("--threads", sim.threads, "Worker threads (0: all cores)")->capture_default_str();
    simulate->add_option("--output-dir", output_dir, "Directory for output files")->capture_default_str();
    add_path_options(simulate, opts);

    auto* eval = app.add_subcommand("eval", "Held-out log-likelihood along the path");
    eval->add_option("--train", train, "Training data CSV")->required();
    eval->add_option("--test", test, "Test data CSV")->required();
    eval->add_option("--output-dir", output_dir, "Directory for output files")->capture_default_str();
    add_path_options(eval, opts);

    auto* inv = app.add_subcommand("check-invariance", "Compare paths for S and DSD with a random diagonal D");
    add_input_options(inv, input);
    inv->add_flag("--identity", identity, "Use D = I");
    add_path_options(inv, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*fit) return cmd_fit(input, output_dir, opts, std::cout);
        if (*path) return cmd_path(input, truth, output_dir, opts, std::cout);
        if (*simulate) {
            sim.seed = opts.seed;
            return cmd_simulate(scenario, sim, output_dir, opts, std::cout);
        }
        if (*eval) return cmd_eval(train, test, output_dir, opts, std::cout);
        if (*inv) return cmd_check_invariance(input, identity, opts, std::cout);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const InvalidArgument& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
    return kUsage;
}
