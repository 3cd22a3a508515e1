#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "faircode/bounds.hpp"
#include "faircode/channel.hpp"
#include "faircode/model.hpp"

namespace faircode {

// Exhaustive-search configuration for grid_joint_optimum. Ranges default to
// each flow's [x_lower, x_upper]; the feasibility filter is always the
// schedulability constraint.
struct GridSpec {
    double spacing = 1e-3;
    // optional per-flow range override, scenario flow order; empty = defaults
    std::vector<std::pair<double, double>> ranges;
};

struct GridOptimum {
    std::vector<double> x;  // scenario flow order
    double utility = 0.0;
};

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
};

// Brute-force maximiser of sum ln(1 - e_f(x_f)) over the feasible grid.
// Grid points are x_lower + i*spacing with x_upper appended when the step
// pattern misses it; ties break toward smaller x in flow order (first
// strictly better utility wins in lexicographic scan order).
// Throws TooLarge for more than 3 flows, Infeasible via validate.
GridOptimum grid_joint_optimum(const Scenario& scenario, const GridSpec& grid);

// Numerically witnesses that eliminating theta through its closed form
// loses nothing: the best ln(1 - e(theta, x)) over a full (theta, x) grid
// must match max over x of ln(1 - e(theta*(x), x)) within the local
// function variation around the grid argmax.
bool coordinate_vs_joint_check(std::int64_t k, double beta, int theta_grid, int x_grid);

// Seeded Monte Carlo estimate of the decoding failure probability
// P{Binomial(n, beta) > (n-k)/2}. Uses mt19937_64 with an explicit 53-bit
// uniform mapping so results are identical across platforms.
McEstimate monte_carlo_packet_error(std::int64_t k, std::int64_t n, double beta,
                                    std::int64_t trials, std::uint64_t seed);

// Literal odd-parity sum over all 2^hops error patterns; the exponential-
// cost cross-check for cascade_crossover. Throws TooLarge above 20 hops.
double cascade_enumeration(const BscCascade& cascade);

// Staged grid minimisation of chernoff_upper over theta in (0, hi]:
// `stages` passes of `points`-node grids, each recentred on the previous
// argmin with a window of +-2 spacings. Returns (theta, value).
std::pair<double, double> grid_min_chernoff(const BoundInput& in, double hi, int points,
                                            int stages);

}  // namespace faircode
