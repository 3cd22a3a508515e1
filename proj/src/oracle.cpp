#include "faircode/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include "faircode/errors.hpp"

namespace faircode {

namespace {

std::vector<double> grid_points(double lo, double hi, double spacing) {
    std::vector<double> pts;
    for (std::int64_t i = 0;; ++i) {
        const double v = lo + spacing * static_cast<double>(i);
        if (v >= hi - 1e-12)
            break;
        pts.push_back(v);
    }
    pts.push_back(hi);  // exact upper end, the step pattern usually misses it
    return pts;
}

// Uniform double in [0, 1) from the top 53 bits; std::binomial_distribution
// is implementation-defined, this mapping is not.
double uniform53(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

GridOptimum grid_joint_optimum(const Scenario& scenario, const GridSpec& grid) {
    if (scenario.flows.size() > 3)
        throw TooLarge("grid_joint_optimum: exhaustive search supports at most 3 flows");
    if (!(grid.spacing > 0.0))
        throw InvalidDimensions("grid_joint_optimum: spacing must be > 0");
    if (!grid.ranges.empty() && grid.ranges.size() != scenario.flows.size())
        throw InvalidDimensions("grid_joint_optimum: ranges must match the flow count");

    const auto channels = validate(scenario);
    const std::size_t F = scenario.flows.size();
    const std::size_t C = scenario.cells.size();

    std::map<std::string, std::size_t> cell_index;
    for (std::size_t ci = 0; ci < C; ++ci)
        cell_index.emplace(scenario.cells[ci].id, ci);

    // Per flow and grid point: the utility term and the load it adds to
    // each cell, so the combinatorial scan is pure accumulation.
    std::vector<std::vector<double>> xs(F);
    std::vector<std::vector<double>> uterm(F);
    std::vector<std::vector<std::vector<double>>> load(F);  // [flow][point][cell]
    for (std::size_t i = 0; i < F; ++i) {
        const auto& spec = scenario.flows[i];
        const auto& ch = channels[i];
        double lo = ch.x_lower, hi = ch.x_upper;
        if (!grid.ranges.empty()) {
            lo = grid.ranges[i].first;
            hi = grid.ranges[i].second;
            if (!(ch.beta < lo && lo <= hi && hi < 0.5))
                throw InvalidDimensions("grid_joint_optimum: range for flow " + spec.id +
                                        " outside (beta, 0.5)");
        }
        xs[i] = grid_points(lo, hi, grid.spacing);
        uterm[i].reserve(xs[i].size());
        load[i].reserve(xs[i].size());
        for (double x : xs[i]) {
            uterm[i].push_back(std::log1p(-kl_exponent_upper({spec.packet_size, x, ch.beta})));
            std::vector<double> l(C, 0.0);
            for (const auto& cell : spec.route)
                l[cell_index.at(cell)] += static_cast<double>(spec.packet_size) /
                                          ((1.0 - 2.0 * x) * spec.phy_rate.at(cell));
            load[i].push_back(std::move(l));
        }
    }

    std::vector<double> period;
    period.reserve(C);
    for (const auto& cell : scenario.cells)
        period.push_back(cell.period_s);

    GridOptimum best;
    best.utility = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> pick(F, 0);

    // Lexicographic scan; only strictly better utility replaces the
    // incumbent, so ties resolve toward smaller x.
    std::vector<double> acc(C, 0.0);
    std::vector<std::vector<double>> acc_stack(F + 1, std::vector<double>(C, 0.0));
    std::vector<double> u_stack(F + 1, 0.0);

    auto scan = [&](auto&& self, std::size_t level) -> void {
        if (level == F) {
            for (std::size_t ci = 0; ci < C; ++ci)
                if (acc_stack[F][ci] > period[ci])
                    return;
            if (u_stack[F] > best.utility) {
                best.utility = u_stack[F];
                best.x.resize(F);
                for (std::size_t i = 0; i < F; ++i)
                    best.x[i] = xs[i][pick[i]];
            }
            return;
        }
        for (std::size_t j = 0; j < xs[level].size(); ++j) {
            pick[level] = j;
            for (std::size_t ci = 0; ci < C; ++ci)
                acc_stack[level + 1][ci] = acc_stack[level][ci] + load[level][j][ci];
            u_stack[level + 1] = u_stack[level] + uterm[level][j];
            self(self, level + 1);
        }
    };
    scan(scan, 0);

    if (best.x.empty())
        throw Infeasible("grid_joint_optimum: no feasible grid point");  // unreachable: validate passed
    return best;
}

bool coordinate_vs_joint_check(std::int64_t k, double beta, int theta_grid, int x_grid) {
    if (theta_grid < 1 || x_grid < 1)
        throw InvalidDimensions("coordinate_vs_joint_check: grids must have >= 1 point");
    if (theta_grid < 2 || x_grid < 2)
        return true;  // no neighbouring cell to measure variation against

    const double theta_hi = 20.0;
    std::vector<double> xs(x_grid), thetas(theta_grid);
    for (int i = 0; i < x_grid; ++i)
        xs[i] = beta + (0.5 - beta) * (i + 1) / (x_grid + 1);
    for (int j = 0; j < theta_grid; ++j)
        thetas[j] = theta_hi * (j + 1) / theta_grid;

    const double ninf = -std::numeric_limits<double>::infinity();
    auto joint_term = [&](int i, int j) {
        const double e = chernoff_upper({k, xs[i], beta}, thetas[j]);
        return e < 1.0 ? std::log1p(-e) : ninf;
    };

    double joint_best = ninf;
    int bi = 0, bj = 0;
    for (int i = 0; i < x_grid; ++i)
        for (int j = 0; j < theta_grid; ++j) {
            const double v = joint_term(i, j);
            if (v > joint_best) {
                joint_best = v;
                bi = i;
                bj = j;
            }
        }

    double coord_best = ninf;
    for (int i = 0; i < x_grid; ++i)
        coord_best = std::max(coord_best, std::log1p(-kl_exponent_upper({k, xs[i], beta})));

    // One grid cell's worth of function variation around the joint argmax.
    double variation = 0.0;
    for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
            const int i = bi + di, j = bj + dj;
            if (i < 0 || j < 0 || i >= x_grid || j >= theta_grid)
                continue;
            const double v = joint_term(i, j);
            if (v != ninf)
                variation = std::max(variation, std::abs(v - joint_best));
        }

    return coord_best - joint_best <= variation + 1e-12;
}

McEstimate monte_carlo_packet_error(std::int64_t k, std::int64_t n, double beta,
                                    std::int64_t trials, std::uint64_t seed) {
    if (k < 1 || k > n)
        throw InvalidDimensions("monte_carlo_packet_error: need 1 <= k <= n");
    if (!(beta >= 0.0 && beta <= 1.0))
        throw InvalidDimensions("monte_carlo_packet_error: beta outside [0, 1]");
    if (trials < 1)
        throw InvalidDimensions("monte_carlo_packet_error: trials must be >= 1");

    const std::int64_t t0 = (n - k) / 2 + 1;
    std::mt19937_64 gen(seed);
    std::int64_t hits = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
        std::int64_t flips = 0;
        for (std::int64_t i = 0; i < n; ++i)
            flips += uniform53(gen) < beta ? 1 : 0;
        hits += flips >= t0 ? 1 : 0;
    }

    McEstimate est;
    est.trials = trials;
    est.seed = seed;
    est.mean = static_cast<double>(hits) / static_cast<double>(trials);
    est.stderr_ = std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(trials));
    return est;
}

double cascade_enumeration(const BscCascade& cascade) {
    const std::size_t h = cascade.hops.size();
    if (h == 0)
        throw InvalidDimensions("cascade_enumeration: cascade has no hops");
    if (h > 20)
        throw TooLarge("cascade_enumeration: enumeration over 2^hops capped at 20 hops");

    double total = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << h); ++mask) {
        if ((std::popcount(mask) & 1) == 0)
            continue;
        double prob = 1.0;
        for (std::size_t i = 0; i < h; ++i)
            prob *= (mask >> i) & 1 ? cascade.hops[i] : 1.0 - cascade.hops[i];
        total += prob;
    }
    return total;
}

std::pair<double, double> grid_min_chernoff(const BoundInput& in, double hi, int points,
                                            int stages) {
    if (points < 2 || stages < 1 || !(hi > 0.0))
        throw InvalidDimensions("grid_min_chernoff: need points >= 2, stages >= 1, hi > 0");

    double lo = 0.0, window_hi = hi;
    double best_theta = hi, best_val = std::numeric_limits<double>::infinity();
    for (int s = 0; s < stages; ++s) {
        const double step = (window_hi - lo) / points;
        double stage_theta = window_hi;
        double stage_val = std::numeric_limits<double>::infinity();
        for (int j = 1; j <= points; ++j) {
            const double theta = lo + step * j;
            const double v = chernoff_upper(in, theta);
            if (v < stage_val) {
                stage_val = v;
                stage_theta = theta;
            }
        }
        if (stage_val < best_val) {
            best_val = stage_val;
            best_theta = stage_theta;
        }
        lo = std::max(1e-12, stage_theta - 2.0 * step);
        window_hi = std::min(hi, stage_theta + 2.0 * step);
    }
    return {best_theta, best_val};
}

}  // namespace faircode
