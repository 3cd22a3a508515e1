#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace faircode {

struct CellSpec {
    std::string id;
    double period_s = 0.0;  // TDMA schedule period T_c, seconds
};

// One unicast flow. The channel is given either per hop (per_hop_crossover
// keyed exactly by the route) or as a direct end-to-end symbol error
// probability; the two are mutually exclusive.
struct FlowSpec {
    std::string id;
    std::vector<std::string> route;                   // ordered cell ids, loop-free
    std::int64_t packet_size = 0;                     // k, information symbols
    int bits_per_symbol = 1;                          // m
    std::map<std::string, double> per_hop_crossover;  // cell id -> alpha
    std::optional<double> direct_beta;
    std::map<std::string, double> phy_rate;           // cell id -> w, coded symbols/s
};

struct RateBoundsOverride {
    std::optional<double> x_lower;
    std::optional<double> x_upper;
};

struct Scenario {
    std::vector<CellSpec> cells;
    std::vector<FlowSpec> flows;
    std::map<std::string, RateBoundsOverride> rate_bounds;  // flow id -> override
};

// Derived per-flow channel parameters and admissible rate window.
struct FlowChannel {
    std::string flow_id;
    double alpha_end_to_end = 0.0;
    double beta = 0.0;
    double x_lower = 0.0;
    double x_upper = 0.0;
};

// Default margin above beta for the lower rate bound: keeps Lambda > 0 and
// the convexity constant finite while staying negligible against practical
// symbol error rates.
double default_epsilon(double beta);

// Default upper bound on x, bounded away from 0.5 so air-times stay finite.
constexpr double kDefaultXUpper = 0.5 - 1e-3;

// Checks structure, derives the per-flow channels, and confirms the
// instance is schedulable at x = x_lower in every cell.
// Throws ParseError (structural), UnknownCell, DegenerateChannel (beta
// outside (0, 0.5) or an empty rate window), Infeasible (some cell cannot
// fit its flows even at the lowest rate parameter, message names the cell
// and deficit).
std::vector<FlowChannel> validate(const Scenario& scenario);

// F_c: ids of flows whose route contains the cell. Throws UnknownCell.
std::set<std::string> flows_in_cell(const Scenario& scenario, const std::string& cell);

}  // namespace faircode
