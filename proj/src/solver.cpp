#include "faircode/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "faircode/bounds.hpp"
#include "faircode/channel.hpp"
#include "faircode/errors.hpp"

namespace faircode {

namespace {

// Index-based view of a validated scenario for the iteration hot loop;
// string keys are resolved once and reappear only in the report.
struct Compiled {
    struct Flow {
        double k = 0.0;
        double beta = 0.0;
        double log_beta_q = 0.0;  // ln(beta*(1-beta)), reused by Lambda(x)
        double x_lo = 0.0;
        double x_hi = 0.0;
        std::vector<int> cells;
        std::vector<double> w;
    };
    std::vector<std::string> cell_ids;
    std::vector<double> period;
    std::vector<Flow> flows;
    std::vector<std::vector<std::pair<int, double>>> cell_flows;  // (flow index, w)
};

Compiled compile(const Scenario& scenario, const std::vector<FlowChannel>& channels) {
    Compiled c;
    std::map<std::string, int> cell_index;
    for (const auto& cell : scenario.cells) {
        cell_index.emplace(cell.id, static_cast<int>(c.cell_ids.size()));
        c.cell_ids.push_back(cell.id);
        c.period.push_back(cell.period_s);
    }
    c.cell_flows.resize(c.cell_ids.size());
    c.flows.reserve(scenario.flows.size());
    for (std::size_t i = 0; i < scenario.flows.size(); ++i) {
        const auto& spec = scenario.flows[i];
        const auto& ch = channels[i];
        Compiled::Flow f;
        f.k = static_cast<double>(spec.packet_size);
        f.beta = ch.beta;
        f.log_beta_q = std::log(ch.beta * (1.0 - ch.beta));
        f.x_lo = ch.x_lower;
        f.x_hi = ch.x_upper;
        for (const auto& cell : spec.route) {
            const int ci = cell_index.at(cell);
            const double w = spec.phy_rate.at(cell);
            f.cells.push_back(ci);
            f.w.push_back(w);
            c.cell_flows[ci].emplace_back(static_cast<int>(i), w);
        }
        c.flows.push_back(std::move(f));
    }
    return c;
}

// g(x) = (k/(1-2x)) D(B(x)||B(beta)) - ln(1 + Lambda(x)/lambda); the root
// is the interior stationary point. Negative left of the root.
double g_eval(const Compiled::Flow& f, double inv_lambda, double x) {
    const double u = 1.0 - 2.0 * x;
    const double d = x - f.beta;
    const double kl = x * std::log1p(d / f.beta) + (1.0 - x) * std::log1p(-d / (1.0 - f.beta));
    const double lam = std::log(x * (1.0 - x)) - f.log_beta_q;
    return f.k / u * kl - std::log1p(lam * inv_lambda);
}

double x_star_core(const Compiled::Flow& f, double lambda, double tol) {
    if (!(lambda > 0.0))
        return f.x_hi;  // free schedule time: utility strictly increasing in x

    const double inv_lambda = 1.0 / lambda;
    double lo = f.beta + (0.5 - f.beta) * 1e-12;
    double hi = 0.5 - 1e-13;
    if (g_eval(f, inv_lambda, lo) >= 0.0) {
        // Root is squeezed against beta (enormous lambda); the clamp below
        // lands it on x_lower anyway.
        return f.x_lo;
    }
    if (!(g_eval(f, inv_lambda, hi) > 0.0))
        throw NumericalFailure("solve_x_star: bisection bracket failed near x = 0.5");

    int guard = 0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (g_eval(f, inv_lambda, mid) < 0.0 ? lo : hi) = mid;
        if (++guard > 200)
            throw NumericalFailure("solve_x_star: bisection failed to contract");
    }
    return std::clamp(0.5 * (lo + hi), f.x_lo, f.x_hi);
}

double packet_error_upper(const Compiled::Flow& f, double x) {
    const double d = x - f.beta;
    const double kl = x * std::log1p(d / f.beta) + (1.0 - x) * std::log1p(-d / (1.0 - f.beta));
    return std::exp(-f.k / (1.0 - 2.0 * x) * kl);
}

double utility_at(const Compiled& c, const std::vector<double>& x) {
    double u = 0.0;
    for (std::size_t i = 0; i < c.flows.size(); ++i)
        u += std::log1p(-packet_error_upper(c.flows[i], x[i]));
    return u;
}

double load_of_cell(const Compiled& c, int ci, const std::vector<double>& x) {
    double load = 0.0;
    for (const auto& [fi, w] : c.cell_flows[ci])
        load += c.flows[fi].k / ((1.0 - 2.0 * x[fi]) * w);
    return load;
}

// Uniformly scales air-times down (clamping at x_lower) until every cell
// fits its period. Terminates because validate() certified feasibility at
// x_lower and x only ever decreases.
void project_feasible(const Compiled& c, std::vector<double>& x) {
    for (int round = 0; round < 64; ++round) {
        bool violated = false;
        for (std::size_t ci = 0; ci < c.period.size(); ++ci) {
            const double load = load_of_cell(c, static_cast<int>(ci), x);
            if (load <= c.period[ci])
                continue;
            violated = true;
            const double scale = c.period[ci] / load;
            for (const auto& [fi, w] : c.cell_flows[ci]) {
                (void)w;
                const double u = (1.0 - 2.0 * x[fi]) / scale;
                x[fi] = std::max(c.flows[fi].x_lo, 0.5 * (1.0 - u));
            }
        }
        if (!violated)
            break;
    }
}

double default_gamma0(const Compiled& c) {
    double min_period = std::numeric_limits<double>::infinity();
    for (double T : c.period)
        min_period = std::min(min_period, T);
    double scale = 0.0;
    for (const auto& f : c.flows) {
        double mean_w = 0.0;
        for (double w : f.w)
            mean_w += w;
        mean_w /= static_cast<double>(f.w.size());
        scale += f.k / mean_w;
    }
    return 1e-2 * min_period / scale;
}

}  // namespace

double lambda_price(const FlowSpec& flow, const PriceVector& prices) {
    double sum = 0.0;
    for (const auto& cell : flow.route) {
        auto it = prices.find(cell);
        if (it == prices.end())
            throw UnknownCell("lambda_price: no price for cell " + cell);
        sum += it->second / flow.phy_rate.at(cell);
    }
    return 2.0 * sum;
}

double solve_x_star(const FlowChannel& channel, std::int64_t k, double lambda, double tol) {
    if (!(tol > 0.0))
        throw InvalidDimensions("solve_x_star: tol must be > 0");
    if (lambda < 0.0)
        throw InvalidDimensions("solve_x_star: lambda must be >= 0");
    Compiled::Flow f;
    f.k = static_cast<double>(k);
    f.beta = channel.beta;
    f.log_beta_q = std::log(channel.beta * (1.0 - channel.beta));
    f.x_lo = channel.x_lower;
    f.x_hi = channel.x_upper;
    return x_star_core(f, lambda, tol);
}

double residual_e_over_1_minus_e(const FlowChannel& channel, std::int64_t k, double x) {
    const double e = kl_exponent_upper({k, x, channel.beta});
    return e / (1.0 - e) * capital_lambda(x, channel.beta);
}

double cell_load(const Scenario& scenario, const std::string& cell,
                 const std::vector<double>& x) {
    if (x.size() != scenario.flows.size())
        throw InvalidDimensions("cell_load: x must have one entry per flow");
    bool known = false;
    for (const auto& c : scenario.cells)
        known = known || c.id == cell;
    if (!known)
        throw UnknownCell("cell_load: unknown cell " + cell);

    double load = 0.0;
    for (std::size_t i = 0; i < scenario.flows.size(); ++i) {
        const auto& flow = scenario.flows[i];
        if (std::find(flow.route.begin(), flow.route.end(), cell) == flow.route.end())
            continue;
        load += static_cast<double>(flow.packet_size) /
                ((1.0 - 2.0 * x[i]) * flow.phy_rate.at(cell));
    }
    return load;
}

PriceVector subgradient_step(const PriceVector& prices, const Scenario& scenario,
                             const std::vector<double>& x_star, double gamma) {
    if (!(gamma > 0.0))
        throw InvalidDimensions("subgradient_step: gamma must be > 0");
    PriceVector next;
    for (const auto& cell : scenario.cells) {
        const double slack = cell.period_s - cell_load(scenario, cell.id, x_star);
        auto it = prices.find(cell.id);
        const double p = it == prices.end() ? 0.0 : it->second;
        next[cell.id] = std::max(0.0, p - gamma * slack);
    }
    return next;
}

double dual_value(const Scenario& scenario, const PriceVector& prices) {
    const auto channels = validate(scenario);
    const Compiled c = compile(scenario, channels);
    std::vector<double> p(c.cell_ids.size(), 0.0);
    for (std::size_t ci = 0; ci < c.cell_ids.size(); ++ci) {
        auto it = prices.find(c.cell_ids[ci]);
        if (it != prices.end())
            p[ci] = it->second;
    }

    std::vector<double> x(c.flows.size());
    for (std::size_t i = 0; i < c.flows.size(); ++i) {
        const auto& f = c.flows[i];
        double lambda = 0.0;
        for (std::size_t h = 0; h < f.cells.size(); ++h)
            lambda += p[f.cells[h]] / f.w[h];
        lambda *= 2.0;
        x[i] = x_star_core(f, lambda, 1e-13);
    }

    double d = utility_at(c, x);
    for (std::size_t ci = 0; ci < c.period.size(); ++ci)
        d += p[ci] * (c.period[ci] - load_of_cell(c, static_cast<int>(ci), x));
    return d;
}

SolveReport solve(const Scenario& scenario, const SolverOptions& options) {
    if (!(options.price_tolerance > 0.0) || !(options.violation_tolerance > 0.0) ||
        !(options.bisection_tolerance > 0.0) || options.max_iterations < 1)
        throw InvalidDimensions("solve: tolerances must be > 0 and max_iterations >= 1");

    const auto channels = validate(scenario);
    const Compiled c = compile(scenario, channels);
    const std::size_t C = c.cell_ids.size();
    const std::size_t F = c.flows.size();

    SolveReport rep;
    rep.cell_order = c.cell_ids;

    for (std::size_t i = 0; i < F; ++i) {
        const auto& f = c.flows[i];
        const std::int64_t k = scenario.flows[i].packet_size;
        const std::int64_t need = min_k_for_convexity(f.beta, f.x_lo - f.beta);
        if (k < need)
            rep.warnings.push_back("flow " + scenario.flows[i].id + ": k = " + std::to_string(k) +
                                   " is below the convexity threshold " + std::to_string(need) +
                                   " for its rate window; the optimum is still the unique "
                                   "stationary point but the sufficient condition fails");
    }

    const double gamma0 = options.gamma0 > 0.0 ? options.gamma0 : default_gamma0(c);
    const double xtol = options.bisection_tolerance;

    std::vector<double> p(C, 0.0);
    for (const auto& [cell, price] : options.initial_prices) {
        auto it = std::find(c.cell_ids.begin(), c.cell_ids.end(), cell);
        if (it == c.cell_ids.end())
            throw UnknownCell("solve: initial price for unknown cell " + cell);
        if (!(price >= 0.0))
            throw InvalidDimensions("solve: initial price for cell " + cell + " is negative");
        p[static_cast<std::size_t>(it - c.cell_ids.begin())] = price;
    }

    std::vector<double> x(F), lambda(F), slack(C), xproj(F);
    bool converged = false;

    for (std::int64_t it = 1; it <= options.max_iterations; ++it) {
        const double gamma = options.schedule == SolverOptions::Schedule::constant
                                 ? gamma0
                                 : gamma0 / std::sqrt(static_cast<double>(it));

        for (std::size_t i = 0; i < F; ++i) {
            const auto& f = c.flows[i];
            double l = 0.0;
            for (std::size_t h = 0; h < f.cells.size(); ++h)
                l += p[f.cells[h]] / f.w[h];
            lambda[i] = 2.0 * l;
            x[i] = x_star_core(f, lambda[i], xtol);
        }
        for (std::size_t ci = 0; ci < C; ++ci)
            slack[ci] = c.period[ci] - load_of_cell(c, static_cast<int>(ci), x);

        double dual = utility_at(c, x);
        for (std::size_t ci = 0; ci < C; ++ci)
            dual += p[ci] * slack[ci];
        xproj = x;
        project_feasible(c, xproj);

        TraceRow row;
        row.prices = p;
        row.slacks = slack;
        row.dual = dual;
        row.primal = utility_at(c, xproj);
        rep.trace.push_back(std::move(row));

        double dp = 0.0, violation = 0.0;
        for (std::size_t ci = 0; ci < C; ++ci) {
            const double pn = std::max(0.0, p[ci] - gamma * slack[ci]);
            dp = std::max(dp, std::abs(pn - p[ci]));
            violation = std::max(violation, -slack[ci]);
            p[ci] = pn;
        }
        if (dp <= options.price_tolerance && violation <= options.violation_tolerance) {
            converged = true;
            break;
        }
    }
    rep.iterations = static_cast<std::int64_t>(rep.trace.size());
    rep.converged = converged;

    // Primal allocation at the final prices, projected to feasibility.
    for (std::size_t i = 0; i < F; ++i) {
        const auto& f = c.flows[i];
        double l = 0.0;
        for (std::size_t h = 0; h < f.cells.size(); ++h)
            l += p[f.cells[h]] / f.w[h];
        lambda[i] = 2.0 * l;
        x[i] = x_star_core(f, lambda[i], xtol);
    }
    xproj = x;
    project_feasible(c, xproj);

    Allocation& alloc = rep.allocation;
    alloc.flows.reserve(F);
    double U = 0.0, sum_log_k = 0.0;
    for (std::size_t i = 0; i < F; ++i) {
        const auto& spec = scenario.flows[i];
        const auto& f = c.flows[i];
        FlowAllocation fa;
        fa.flow_id = spec.id;
        fa.x_star = xproj[i];
        fa.r_star = 1.0 - 2.0 * xproj[i];
        fa.n_real = f.k / fa.r_star;
        // guard: an integer-valued quotient must not round up from fp excess
        fa.n_int = static_cast<std::int64_t>(std::ceil(fa.n_real - 1e-9));
        fa.e_upper = kl_exponent_upper({spec.packet_size, fa.x_star, f.beta});
        fa.e_lower = lower_bound({spec.packet_size, fa.x_star, f.beta});
        fa.e_exact = exact_packet_error(spec.packet_size, fa.n_int, f.beta);
        for (std::size_t h = 0; h < spec.route.size(); ++h)
            fa.airtime[spec.route[h]] = f.k / ((1.0 - 2.0 * xproj[i]) * f.w[h]);
        U += std::log1p(-fa.e_upper);
        sum_log_k += std::log(f.k);
        alloc.flows.push_back(std::move(fa));
    }
    alloc.utility = U;
    alloc.utility_tilde = U + sum_log_k;

    alloc.cells.reserve(C);
    for (std::size_t ci = 0; ci < C; ++ci) {
        CellState cs;
        cs.cell_id = c.cell_ids[ci];
        cs.price = p[ci];
        cs.slack = c.period[ci] - load_of_cell(c, static_cast<int>(ci), xproj);
        alloc.cells.push_back(std::move(cs));
    }

    KktResiduals& kkt = rep.kkt;
    kkt.dual_min_price = C ? *std::min_element(p.begin(), p.end()) : 0.0;
    const double interior_margin = std::max(1e-9, 10.0 * xtol);
    for (std::size_t i = 0; i < F; ++i) {
        const auto& f = c.flows[i];
        const double xs = xproj[i];
        if (xs <= f.x_lo + interior_margin || xs >= f.x_hi - interior_margin)
            continue;
        const double e = packet_error_upper(f, xs);
        const double lam_x = std::log(xs * (1.0 - xs)) - f.log_beta_q;
        kkt.stationarity =
            std::max(kkt.stationarity, std::abs(e / (1.0 - e) * lam_x - lambda[i]));
    }
    for (const auto& cs : alloc.cells) {
        kkt.primal_violation = std::max(kkt.primal_violation, -cs.slack);
        kkt.complementary_slackness =
            std::max(kkt.complementary_slackness, cs.price * cs.slack);
    }

    return rep;
}

std::map<std::pair<std::string, std::string>, double> airtimes(const Allocation& allocation) {
    std::map<std::pair<std::string, std::string>, double> result;
    for (const auto& fa : allocation.flows)
        for (const auto& [cell, t] : fa.airtime)
            result[{fa.flow_id, cell}] = t;
    return result;
}

Utilities utilities(const Allocation& allocation, const Scenario& scenario) {
    if (allocation.flows.size() != scenario.flows.size())
        throw InvalidDimensions("utilities: allocation does not match the scenario");
    Utilities u;
    for (std::size_t i = 0; i < allocation.flows.size(); ++i) {
        const auto& fa = allocation.flows[i];
        const auto& spec = scenario.flows[i];
        if (fa.flow_id != spec.id)
            throw InvalidDimensions("utilities: allocation flow order does not match scenario");
        u.U += std::log1p(-fa.e_upper);
        u.U_tilde += std::log(static_cast<double>(spec.packet_size));
        u.throughput.push_back(static_cast<double>(spec.packet_size) * (1.0 - fa.e_upper));
    }
    u.U_tilde += u.U;
    return u;
}

}  // namespace faircode
