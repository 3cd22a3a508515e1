#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "faircode/model.hpp"

namespace faircode {

// Per-cell shadow prices p_c >= 0 (utility per second of schedule time).
using PriceVector = std::map<std::string, double>;

struct SolverOptions {
    // gamma0 <= 0 selects the scale-derived default
    // 1e-2 * min_c T_c / (sum_f k_f / mean-route w_f).
    double gamma0 = 0.0;
    enum class Schedule { constant, diminishing } schedule = Schedule::diminishing;
    std::int64_t max_iterations = 200000;
    // Note: the price iteration sees load through a bisection quantised to
    // bisection_tolerance in x, so price changes carry noise of order
    // gamma * dload/dx * bisection_tolerance; price_tolerance below that
    // floor may never trigger.
    double price_tolerance = 1e-7;
    double violation_tolerance = 1e-9;  // seconds
    double bisection_tolerance = 1e-13;
    PriceVector initial_prices;  // cells absent from the map start at 0
};

struct FlowAllocation {
    std::string flow_id;
    double x_star = 0.0;
    double r_star = 0.0;                  // 1 - 2 x*
    double n_real = 0.0;                  // k / r*, continuous relaxation
    std::int64_t n_int = 0;               // ceil(k / r*)
    double e_upper = 0.0;                 // kl_exponent_upper at x*
    double e_lower = 0.0;                 // lower_bound at x*
    double e_exact = 0.0;                 // exact_packet_error at n_int
    std::map<std::string, double> airtime;  // route cell -> k/((1-2x*) w)
};

struct CellState {
    std::string cell_id;
    double price = 0.0;
    double slack = 0.0;  // T_c minus load, seconds
};

struct KktResiduals {
    double stationarity = 0.0;             // max |e/(1-e)*Lambda - lambda_f| over interior flows
    double primal_violation = 0.0;         // max positive constraint violation, seconds
    double dual_min_price = 0.0;           // min p_c (>= 0 by projection)
    double complementary_slackness = 0.0;  // max p_c * slack_c
};

struct Allocation {
    std::vector<FlowAllocation> flows;
    std::vector<CellState> cells;
    double utility = 0.0;        // U = sum ln(1 - e_f)
    double utility_tilde = 0.0;  // U + sum ln k_f
};

// One dual iteration: the prices used, the slacks they induced, the dual
// value there, and the utility of the projected-feasible primal point.
struct TraceRow {
    std::vector<double> prices;
    std::vector<double> slacks;
    double dual = 0.0;
    double primal = 0.0;
};

struct SolveReport {
    Allocation allocation;
    std::vector<std::string> cell_order;  // column ids for the trace vectors
    std::vector<TraceRow> trace;
    std::int64_t iterations = 0;
    bool converged = false;
    KktResiduals kkt;
    std::vector<std::string> warnings;
};

struct Utilities {
    double U = 0.0;
    double U_tilde = 0.0;
    std::vector<double> throughput;  // S_f = k_f (1 - e_f), flow order
};

// lambda_f = 2 * sum over the route of p_c / w_{f,c}.
// Throws UnknownCell when a route cell is missing from the prices.
double lambda_price(const FlowSpec& flow, const PriceVector& prices);

// Unique root x* in (beta, 0.5) of
//   (k/(1-2x)) D(B(x)||B(beta)) = ln((lambda + Lambda(x))/lambda),
// found by bisection to tol and clamped to [x_lower, x_upper]. For
// lambda = 0 the utility is strictly increasing in x, so x_upper is
// returned directly. Throws NumericalFailure if the bracket fails (guards
// implementation bugs; the sign analysis rules it out for lambda > 0).
double solve_x_star(const FlowChannel& channel, std::int64_t k, double lambda, double tol);

// Stationarity residual e/(1-e) * Lambda(x) with e = kl_exponent_upper;
// equals lambda_f at an interior optimum.
double residual_e_over_1_minus_e(const FlowChannel& channel, std::int64_t k, double x);

// Occupied schedule time sum_{f: c in route} k_f/((1-2 x_f) w_{f,c});
// x is indexed in scenario flow order. Throws UnknownCell.
double cell_load(const Scenario& scenario, const std::string& cell,
                 const std::vector<double>& x);

// Projected subgradient update p <- max(0, p - gamma*(T_c - load_c)).
PriceVector subgradient_step(const PriceVector& prices, const Scenario& scenario,
                             const std::vector<double>& x_star, double gamma);

// Dual objective D(p) = sum ln(1 - e_f(x*(p))) + sum p_c (T_c - load_c)
// evaluated at the per-flow maximisers for these prices.
double dual_value(const Scenario& scenario, const PriceVector& prices);

// Full price iteration. Stops when the sup-norm price change is within
// price_tolerance and the worst constraint violation within
// violation_tolerance, or at max_iterations (converged flag false, report
// still complete). The returned allocation is x*(p_final) projected to
// feasibility by uniformly scaling air-times down in violating cells.
SolveReport solve(const Scenario& scenario, const SolverOptions& options);

// (flow, cell) -> air-time seconds, extracted from the allocation.
std::map<std::pair<std::string, std::string>, double> airtimes(const Allocation& allocation);

// U, U~ = U + sum ln k_f, and per-flow throughput S_f = k_f (1 - e_f).
Utilities utilities(const Allocation& allocation, const Scenario& scenario);

}  // namespace faircode
