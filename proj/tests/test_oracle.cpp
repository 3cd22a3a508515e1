#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "faircode/channel.hpp"
#include "faircode/errors.hpp"
#include "faircode/oracle.hpp"
#include "faircode/scenario_io.hpp"
#include "faircode/solver.hpp"

using namespace faircode;

namespace {

std::string scenario_path(const char* name) {
    return std::string(SCENARIO_DIR) + "/" + name;
}

BscCascade cascade(std::vector<double> hops) {
    BscCascade c;
    c.hops = std::move(hops);
    return c;
}

}  // namespace

TEST_CASE("cascade_enumeration: closed cases and the recurrence cross-check") {
    CHECK(cascade_enumeration(cascade({0.07})) == doctest::Approx(0.07).epsilon(1e-15));
    CHECK(cascade_enumeration(cascade({0.1, 0.1})) == doctest::Approx(0.18).epsilon(1e-15));
    CHECK(cascade_enumeration(cascade({0.5, 0.123})) == doctest::Approx(0.5).epsilon(1e-15));

    std::mt19937_64 gen(20240817);
    std::uniform_real_distribution<double> hop(0.0, 1.0);
    std::uniform_int_distribution<int> len(1, 12);
    for (int trial = 0; trial < 100; ++trial) {
        BscCascade c;
        const int h = len(gen);
        for (int i = 0; i < h; ++i)
            c.hops.push_back(hop(gen));
        const double brute = cascade_enumeration(c);
        const double fast = cascade_crossover(c);
        CHECK(std::abs(brute - fast) <= 1e-12 * std::max(1.0, std::abs(fast)));
    }

    CHECK_THROWS_AS(cascade_enumeration(cascade({})), InvalidDimensions);
    CHECK_THROWS_AS(cascade_enumeration(cascade(std::vector<double>(21, 0.1))), TooLarge);
}

TEST_CASE("monte_carlo_packet_error: degenerate channels") {
    const McEstimate clean = monte_carlo_packet_error(10, 20, 0.0, 1000, 7);
    CHECK(clean.mean == 0.0);
    CHECK(clean.stderr_ == 0.0);
    CHECK(clean.trials == 1000);
    CHECK(clean.seed == 7);

    const McEstimate broken = monte_carlo_packet_error(10, 20, 1.0, 1000, 7);
    CHECK(broken.mean == 1.0);
    CHECK(broken.stderr_ == 0.0);
}

TEST_CASE("monte_carlo_packet_error agrees with the exact tail") {
    const double exact = exact_packet_error(10, 20, 0.05);
    const McEstimate est = monte_carlo_packet_error(10, 20, 0.05, 100000, 42);
    CHECK(est.mean > 0.0);
    CHECK(std::abs(est.mean - exact) <= 3.0 * est.stderr_);

    // same seed, same bits; fresh seeds move the draw
    const McEstimate rerun = monte_carlo_packet_error(10, 20, 0.05, 100000, 42);
    CHECK(rerun.mean == est.mean);
    CHECK(rerun.stderr_ == est.stderr_);

    bool any_differs = false;
    const McEstimate base = monte_carlo_packet_error(2, 4, 0.5, 10000, 1);
    for (std::uint64_t seed = 2; seed <= 5; ++seed)
        any_differs =
            any_differs || monte_carlo_packet_error(2, 4, 0.5, 10000, seed).mean != base.mean;
    CHECK(any_differs);
}

TEST_CASE("monte_carlo_packet_error: stderr shrinks like 1/sqrt(trials)") {
    const McEstimate small = monte_carlo_packet_error(2, 4, 0.5, 1000, 3);
    const McEstimate large = monte_carlo_packet_error(2, 4, 0.5, 100000, 3);
    const double ratio = small.stderr_ / large.stderr_;
    CHECK(ratio > 9.0);
    CHECK(ratio < 11.0);
}

TEST_CASE("monte_carlo_packet_error rejects bad inputs") {
    CHECK_THROWS_AS(monte_carlo_packet_error(0, 4, 0.5, 10, 1), InvalidDimensions);
    CHECK_THROWS_AS(monte_carlo_packet_error(5, 4, 0.5, 10, 1), InvalidDimensions);
    CHECK_THROWS_AS(monte_carlo_packet_error(2, 4, -0.1, 10, 1), InvalidDimensions);
    CHECK_THROWS_AS(monte_carlo_packet_error(2, 4, 1.1, 10, 1), InvalidDimensions);
    CHECK_THROWS_AS(monte_carlo_packet_error(2, 4, 0.5, 0, 1), InvalidDimensions);
}

TEST_CASE("coordinate_vs_joint_check holds where the closed form applies") {
    CHECK(coordinate_vs_joint_check(50, 0.05, 300, 300));
    CHECK(coordinate_vs_joint_check(10, 0.1, 300, 300));
    CHECK(coordinate_vs_joint_check(200, 0.02, 150, 150));
    // degenerate grids have no variation to compare against
    CHECK(coordinate_vs_joint_check(50, 0.05, 1, 1));
    CHECK(coordinate_vs_joint_check(50, 0.05, 1, 40));
    CHECK(coordinate_vs_joint_check(50, 0.05, 40, 1));
    CHECK_THROWS_AS(coordinate_vs_joint_check(50, 0.05, 0, 10), InvalidDimensions);
}

TEST_CASE("grid_joint_optimum: unconstrained flow rides to the cap") {
    const Scenario sc = load_scenario(scenario_path("single_abundant.json"));
    const GridOptimum best = grid_joint_optimum(sc, GridSpec{});
    REQUIRE(best.x.size() == 1);
    CHECK(best.x[0] == 0.2);  // the cap itself is always a grid node
    CHECK(best.utility ==
          doctest::Approx(std::log1p(-kl_exponent_upper({50, 0.2, 0.02}))).epsilon(1e-12));
}

TEST_CASE("grid_joint_optimum: tight budget stops at the last feasible node") {
    const Scenario sc = load_scenario(scenario_path("single_tight.json"));
    const GridOptimum best = grid_joint_optimum(sc, GridSpec{});
    REQUIRE(best.x.size() == 1);

    // budget allows x <= 1/12; the grid runs 0.0201 + i*1e-3
    CHECK(best.x[0] == doctest::Approx(0.0831).epsilon(1e-9));

    // the solver's boundary optimum sits within one grid cell and beats the
    // grid utility
    SolverOptions opt;
    opt.gamma0 = 1e5;
    opt.schedule = SolverOptions::Schedule::constant;
    opt.price_tolerance = 1e-8;
    const SolveReport rep = solve(sc, opt);
    REQUIRE(rep.converged);
    CHECK(std::abs(rep.allocation.flows[0].x_star - best.x[0]) <= 1e-3 + 1e-9);
    CHECK(rep.allocation.utility >= best.utility - 1e-9);
}

TEST_CASE("grid_joint_optimum vs solver on a coupled two-cell instance") {
    const Scenario sc = load_scenario(scenario_path("example2_k100.json"));
    SolverOptions opt;
    opt.gamma0 = 8e6;
    const SolveReport rep = solve(sc, opt);
    REQUIRE(rep.converged);

    const GridOptimum best = grid_joint_optimum(sc, GridSpec{});
    REQUIRE(best.x.size() == 2);

    // duality sandwich: grid utility <= true optimum <= dual value
    CHECK(rep.allocation.utility >= best.utility - 1e-3);
    PriceVector prices;
    for (const auto& cs : rep.allocation.cells)
        prices[cs.cell_id] = cs.price;
    CHECK(dual_value(sc, prices) >= best.utility - 1e-9);

    for (std::size_t i = 0; i < 2; ++i)
        CHECK(std::abs(rep.allocation.flows[i].x_star - best.x[i]) <= 1e-3 * (1.0 + 1e-9) + 1e-12);
}

TEST_CASE("grid_joint_optimum: range overrides and input guards") {
    const Scenario sc = load_scenario(scenario_path("single_abundant.json"));

    GridSpec narrowed;
    narrowed.ranges = {{0.05, 0.1}};
    CHECK(grid_joint_optimum(sc, narrowed).x[0] == 0.1);

    GridSpec below_beta;
    below_beta.ranges = {{0.01, 0.1}};
    CHECK_THROWS_AS(grid_joint_optimum(sc, below_beta), InvalidDimensions);

    GridSpec wrong_count;
    wrong_count.ranges = {{0.05, 0.1}, {0.05, 0.1}};
    CHECK_THROWS_AS(grid_joint_optimum(sc, wrong_count), InvalidDimensions);

    GridSpec no_spacing;
    no_spacing.spacing = 0.0;
    CHECK_THROWS_AS(grid_joint_optimum(sc, no_spacing), InvalidDimensions);

    // exhaustive search is capped at three flows
    Scenario wide;
    for (int i = 0; i < 4; ++i) {
        const std::string n = std::to_string(i + 1);
        wide.cells.push_back({"c" + n, 1.0});
        FlowSpec f;
        f.id = "f" + n;
        f.route = {"c" + n};
        f.packet_size = 10;
        f.direct_beta = 0.1;
        f.phy_rate["c" + n] = 1e4;
        wide.flows.push_back(std::move(f));
    }
    CHECK_THROWS_AS(grid_joint_optimum(wide, GridSpec{}), TooLarge);
}

TEST_CASE("dual values dominate every feasible grid point") {
    const Scenario sc = load_scenario(scenario_path("single_tight.json"));
    const GridOptimum best = grid_joint_optimum(sc, GridSpec{});
    for (double p : {0.0, 50.0, 220.456, 1000.0})
        CHECK(dual_value(sc, {{"c", p}}) >= best.utility - 1e-9);
}

TEST_CASE("grid_min_chernoff closes in on the closed-form minimum") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> beta_draw(0.02, 0.3);
    std::uniform_real_distribution<double> span(0.05, 0.95);
    std::uniform_int_distribution<std::int64_t> k_draw(2, 60);
    for (int trial = 0; trial < 15; ++trial) {
        const double beta = beta_draw(gen);
        const double x = beta + (0.45 - beta) * span(gen);
        const BoundInput in{k_draw(gen), x, beta};
        const double closed = kl_exponent_upper(in);
        const auto [theta, value] = grid_min_chernoff(in, 20.0, 1000, 3);
        CHECK(value >= closed * (1.0 - 1e-12));
        CHECK(value <= closed * (1.0 + 1e-9));
        CHECK(std::abs(theta - optimal_theta(x, beta)) <= 1e-4);
    }
    CHECK_THROWS_AS(grid_min_chernoff({10, 0.2, 0.1}, 20.0, 1, 3), InvalidDimensions);
    CHECK_THROWS_AS(grid_min_chernoff({10, 0.2, 0.1}, 0.0, 100, 3), InvalidDimensions);
}
