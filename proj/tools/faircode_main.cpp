// faircode command-line front-end.
//
// Exit codes: 0 success, 2 parse/usage error, 4 solver stopped at the
// iteration cap (report still written), 3 everything that makes the
// instance unsolvable (infeasible, degenerate channel, numerics).

#include "CLI11.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "faircode/bounds.hpp"
#include "faircode/errors.hpp"
#include "faircode/model.hpp"
#include "faircode/oracle.hpp"
#include "faircode/report.hpp"
#include "faircode/scenario_io.hpp"
#include "faircode/solver.hpp"

namespace {

using namespace faircode;

constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNotConverged = 4;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

int usage_error(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    return kExitUsage;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParseError("cannot open output file: " + path);
    out << text;
    if (!out)
        throw ParseError("cannot write output file: " + path);
}

int run_validate(const std::string& path) {
    Scenario scenario = load_scenario(path);
    std::vector<FlowChannel> channels = validate(scenario);

    std::cout << "flow,alpha,beta,x_lower,x_upper\n";
    for (const FlowChannel& ch : channels) {
        std::cout << ch.flow_id << "," << fmt(ch.alpha_end_to_end) << "," << fmt(ch.beta)
                  << "," << fmt(ch.x_lower) << "," << fmt(ch.x_upper) << "\n";
    }

    // Minimum possible load is at x = x_lower; validate() already proved it
    // fits, so headroom is nonnegative here.
    std::vector<double> x_lower(channels.size());
    for (std::size_t i = 0; i < channels.size(); ++i)
        x_lower[i] = channels[i].x_lower;
    std::cout << "\ncell,period_s,min_load_s,headroom_s\n";
    for (const CellSpec& cell : scenario.cells) {
        double load = cell_load(scenario, cell.id, x_lower);
        std::cout << cell.id << "," << fmt(cell.period_s) << "," << fmt(load) << ","
                  << fmt(cell.period_s - load) << "\n";
    }
    return 0;
}

int run_solve(const std::string& path, const SolverOptions& options,
              const std::string& report_path, const std::string& trace_path) {
    Scenario scenario = load_scenario(path);
    SolveReport report = solve(scenario, options);

    for (const std::string& warning : report.warnings)
        std::cerr << "warning: " << warning << "\n";

    std::string rendered = render_report(report);
    if (report_path.empty())
        std::cout << rendered;
    else
        write_text_file(report_path, rendered);
    if (!trace_path.empty())
        write_text_file(trace_path, render_trace_csv(report));

    return report.converged ? 0 : kExitNotConverged;
}

int run_bounds(std::int64_t k, double beta, double x_from, double x_to, std::int64_t steps) {
    if (k < 1)
        return usage_error("k must be a positive integer");
    if (!(beta > 0.0 && beta < 0.5))
        return usage_error("beta must lie in (0, 0.5)");
    if (!(x_from > beta))
        return usage_error("x range must start above beta (no recovery at x <= beta)");
    if (!(x_to >= x_from) || !(x_to < 0.5))
        return usage_error("x range must satisfy x-from <= x-to < 0.5");
    if (steps < 2)
        return usage_error("steps must be at least 2");

    std::cout << "x,theta_star,upper,lower,exact\n";
    for (std::int64_t i = 0; i < steps; ++i) {
        double x = x_from + static_cast<double>(i) * (x_to - x_from) / static_cast<double>(steps - 1);
        BoundInput in{k, x, beta};
        std::cout << fmt(x) << "," << fmt(optimal_theta(x, beta)) << ","
                  << fmt(kl_exponent_upper(in)) << "," << fmt(lower_bound(in)) << ",";
        // The exact binomial tail needs an integer block length n = k/(1-2x).
        double n_real = static_cast<double>(k) / (1.0 - 2.0 * x);
        double n_round = std::round(n_real);
        if (std::abs(n_real - n_round) <= 1e-9 * n_real)
            std::cout << fmt(exact_packet_error(k, static_cast<std::int64_t>(n_round), beta));
        std::cout << "\n";
    }
    return 0;
}

int run_mink(const std::vector<double>& betas, double eps) {
    if (betas.empty())
        return usage_error("at least one beta is required");
    if (!(eps > 0.0))
        return usage_error("eps must be positive");
    for (double beta : betas) {
        if (!(beta > 0.0 && beta < 0.5))
            return usage_error("beta must lie in (0, 0.5), got " + fmt(beta));
    }
    std::cout << "beta,min_k\n";
    for (double beta : betas)
        std::cout << fmt(beta) << "," << min_k_for_convexity(beta, eps) << "\n";
    return 0;
}

int run_oracle(const std::string& path, double spacing, std::uint64_t seed) {
    if (!(spacing > 0.0))
        return usage_error("grid spacing must be positive");

    Scenario scenario = load_scenario(path);
    SolveReport report = solve(scenario, SolverOptions{});

    GridSpec grid;
    grid.spacing = spacing;
    GridOptimum oracle = grid_joint_optimum(scenario, grid);

    double distance = 0.0;
    for (std::size_t i = 0; i < oracle.x.size(); ++i)
        distance = std::max(distance, std::abs(report.allocation.flows[i].x_star - oracle.x[i]));

    PriceVector prices;
    for (const CellState& cell : report.allocation.cells)
        prices[cell.cell_id] = cell.price;
    double margin = dual_value(scenario, prices) - oracle.utility;

    std::cout << "seed: " << seed << "\n";
    std::cout << "solver_utility: " << fmt(report.allocation.utility) << "\n";
    std::cout << "oracle_utility: " << fmt(oracle.utility) << "\n";
    std::cout << "argmax_distance: " << fmt(distance) << "\n";
    std::cout << "weak_duality_margin: " << fmt(margin) << "\n";

    bool utility_ok = report.allocation.utility >= oracle.utility - 1e-3;
    bool distance_ok = distance <= spacing * (1.0 + 1e-9) + 1e-12;
    bool duality_ok = margin >= -1e-9;
    std::cout << "verdict: " << (utility_ok && distance_ok && duality_ok ? "pass" : "fail")
              << "\n";
    return utility_ok && distance_ok && duality_ok ? 0 : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Proportional-fair MDS coding-rate and air-time planner"};
    app.require_subcommand(1);

    std::string validate_path;
    CLI::App* validate_cmd =
        app.add_subcommand("validate", "Check a scenario file and print the derived channels");
    validate_cmd->add_option("file", validate_path, "scenario JSON file")->required();

    std::string solve_path;
    std::string report_path;
    std::string trace_path;
    SolverOptions options;
    CLI::App* solve_cmd =
        app.add_subcommand("solve", "Run the price iteration and write the allocation report");
    solve_cmd->add_option("file", solve_path, "scenario JSON file")->required();
    solve_cmd->add_option("--gamma", options.gamma0,
                          "initial step size (default: derived from the instance scale)");
    solve_cmd->add_option("--max-iter", options.max_iterations, "iteration cap");
    solve_cmd->add_option("--price-tol", options.price_tolerance,
                          "stop when the sup-norm price change falls below this");
    solve_cmd->add_option("--violation-tol", options.violation_tolerance,
                          "largest tolerated constraint violation, seconds");
    solve_cmd->add_option("--report", report_path,
                          "write the JSON report to this file instead of stdout");
    solve_cmd->add_option("--trace", trace_path, "write the per-iteration CSV trace here");

    std::int64_t bounds_k = 0;
    double bounds_beta = 0.0;
    double bounds_from = 0.0;
    double bounds_to = 0.0;
    std::int64_t bounds_steps = 0;
    CLI::App* bounds_cmd =
        app.add_subcommand("bounds", "Tabulate the decoding-failure bounds over an x range");
    bounds_cmd->add_option("--k", bounds_k, "information symbols per packet")->required();
    bounds_cmd->add_option("--beta", bounds_beta, "symbol error probability")->required();
    bounds_cmd->add_option("--x-from", bounds_from, "first x value")->required();
    bounds_cmd->add_option("--x-to", bounds_to, "last x value")->required();
    bounds_cmd->add_option("--steps", bounds_steps, "number of rows")->required();

    std::vector<double> mink_betas;
    double mink_eps = 0.0;
    CLI::App* mink_cmd = app.add_subcommand(
        "mink", "Smallest k making the optimised error bound convex on [beta+eps, 0.5)");
    mink_cmd->add_option("--beta", mink_betas, "symbol error probabilities")
        ->required()
        ->delimiter(',');
    mink_cmd->add_option("--eps", mink_eps, "margin above beta for the checked interval")
        ->required();

    std::string oracle_path;
    double oracle_spacing = 1e-3;
    std::uint64_t oracle_seed = 0;
    CLI::App* oracle_cmd = app.add_subcommand(
        "oracle", "Cross-check the solver against the exhaustive grid optimiser (<= 3 flows)");
    oracle_cmd->add_option("file", oracle_path, "scenario JSON file")->required();
    oracle_cmd->add_option("--grid", oracle_spacing, "grid spacing (also the argmax tolerance)");
    oracle_cmd->add_option("--seed", oracle_seed, "random seed, echoed into the output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (app.got_subcommand(validate_cmd))
            return run_validate(validate_path);
        if (app.got_subcommand(solve_cmd))
            return run_solve(solve_path, options, report_path, trace_path);
        if (app.got_subcommand(bounds_cmd))
            return run_bounds(bounds_k, bounds_beta, bounds_from, bounds_to, bounds_steps);
        if (app.got_subcommand(mink_cmd))
            return run_mink(mink_betas, mink_eps);
        if (app.got_subcommand(oracle_cmd))
            return run_oracle(oracle_path, oracle_spacing, oracle_seed);
    } catch (const ParseError& e) {
        return usage_error(e.what());
    } catch (const UnknownCell& e) {
        return usage_error(e.what());
    } catch (const InvalidDimensions& e) {
        return usage_error(e.what());
    } catch (const TooLarge& e) {
        return usage_error(e.what());
    } catch (const Infeasible& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const DegenerateChannel& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const NoRecovery& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const NumericalFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    }
    return kExitUsage;
}
