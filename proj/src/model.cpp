#include "faircode/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "faircode/channel.hpp"
#include "faircode/errors.hpp"

namespace faircode {

double default_epsilon(double beta) {
    return std::max(1e-4, 1e-3 * beta);
}

namespace {

FlowChannel derive_channel(const Scenario& scenario, const FlowSpec& flow) {
    FlowChannel ch;
    ch.flow_id = flow.id;

    if (flow.direct_beta.has_value()) {
        ch.beta = *flow.direct_beta;
        // back out the per-bit cross-over: beta = 1 - (1-alpha)^m
        ch.alpha_end_to_end =
            -std::expm1(std::log1p(-ch.beta) / static_cast<double>(flow.bits_per_symbol));
    } else {
        BscCascade cascade;
        cascade.hops.reserve(flow.route.size());
        for (const auto& cell : flow.route)
            cascade.hops.push_back(flow.per_hop_crossover.at(cell));
        ch.alpha_end_to_end = cascade_crossover(cascade);
        ch.beta = symbol_error(ch.alpha_end_to_end, flow.bits_per_symbol);
    }

    if (!(ch.beta > 0.0 && ch.beta < 0.5))
        throw DegenerateChannel("flow " + flow.id + ": end-to-end symbol error beta = " +
                                std::to_string(ch.beta) +
                                " outside (0, 0.5); no coding rate below 1 - 2*beta exists");

    ch.x_lower = ch.beta + default_epsilon(ch.beta);
    ch.x_upper = kDefaultXUpper;
    auto it = scenario.rate_bounds.find(flow.id);
    if (it != scenario.rate_bounds.end()) {
        if (it->second.x_lower)
            ch.x_lower = *it->second.x_lower;
        if (it->second.x_upper)
            ch.x_upper = *it->second.x_upper;
    }

    if (!(ch.beta < ch.x_lower && ch.x_lower < ch.x_upper && ch.x_upper < 0.5))
        throw DegenerateChannel("flow " + flow.id +
                                ": rate window violates beta < x_lower < x_upper < 0.5");
    return ch;
}

}  // namespace

std::vector<FlowChannel> validate(const Scenario& scenario) {
    if (scenario.flows.empty())
        throw ParseError("scenario has no flows");

    std::map<std::string, double> period;
    for (const auto& cell : scenario.cells) {
        if (cell.id.empty())
            throw ParseError("cell with empty id");
        if (!(cell.period_s > 0.0))
            throw ParseError("cell " + cell.id + ": period must be > 0");
        if (!period.emplace(cell.id, cell.period_s).second)
            throw ParseError("duplicate cell id " + cell.id);
    }

    std::set<std::string> flow_ids;
    for (const auto& flow : scenario.flows) {
        if (flow.id.empty())
            throw ParseError("flow with empty id");
        if (!flow_ids.insert(flow.id).second)
            throw ParseError("duplicate flow id " + flow.id);
        if (flow.route.empty())
            throw ParseError("flow " + flow.id + ": route is empty");
        if (flow.packet_size < 1)
            throw ParseError("flow " + flow.id + ": packet size k must be >= 1");
        if (flow.bits_per_symbol < 1)
            throw ParseError("flow " + flow.id + ": bits per symbol m must be >= 1");

        std::set<std::string> seen;
        for (const auto& cell : flow.route) {
            if (!period.count(cell))
                throw UnknownCell("flow " + flow.id + ": route references unknown cell " + cell);
            if (!seen.insert(cell).second)
                throw ParseError("flow " + flow.id + ": route repeats cell " + cell);
        }

        const bool has_alpha = !flow.per_hop_crossover.empty();
        if (has_alpha == flow.direct_beta.has_value())
            throw ParseError("flow " + flow.id +
                             ": specify exactly one of per-hop alpha or direct beta");
        if (has_alpha) {
            if (flow.per_hop_crossover.size() != flow.route.size())
                throw ParseError("flow " + flow.id + ": alpha must be keyed exactly by the route");
            for (const auto& [cell, a] : flow.per_hop_crossover) {
                if (!seen.count(cell))
                    throw UnknownCell("flow " + flow.id + ": alpha keyed by non-route cell " + cell);
                if (!(a >= 0.0 && a <= 1.0))
                    throw ParseError("flow " + flow.id + ": alpha for cell " + cell +
                                     " outside [0, 1]");
            }
        } else if (!(*flow.direct_beta >= 0.0 && *flow.direct_beta <= 1.0)) {
            throw ParseError("flow " + flow.id + ": beta outside [0, 1]");
        }

        if (flow.phy_rate.size() != flow.route.size())
            throw ParseError("flow " + flow.id + ": w must be keyed exactly by the route");
        for (const auto& [cell, w] : flow.phy_rate) {
            if (!seen.count(cell))
                throw UnknownCell("flow " + flow.id + ": w keyed by non-route cell " + cell);
            if (!(w > 0.0))
                throw ParseError("flow " + flow.id + ": w for cell " + cell + " must be > 0");
        }
    }

    for (const auto& [flow_id, bounds] : scenario.rate_bounds) {
        if (!flow_ids.count(flow_id))
            throw ParseError("rate_bounds references unknown flow " + flow_id);
        if (!bounds.x_lower && !bounds.x_upper)
            throw ParseError("rate_bounds for flow " + flow_id + " overrides nothing");
    }

    std::vector<FlowChannel> channels;
    channels.reserve(scenario.flows.size());
    for (const auto& flow : scenario.flows)
        channels.push_back(derive_channel(scenario, flow));

    // Schedulability at the lowest admissible rate parameter; if even that
    // overruns a period the instance has no feasible point at all.
    std::map<std::string, double> min_load;
    for (std::size_t i = 0; i < scenario.flows.size(); ++i) {
        const auto& flow = scenario.flows[i];
        const double u = 1.0 - 2.0 * channels[i].x_lower;
        for (const auto& cell : flow.route)
            min_load[cell] +=
                static_cast<double>(flow.packet_size) / (u * flow.phy_rate.at(cell));
    }
    for (const auto& [cell, load] : min_load) {
        const double T = period.at(cell);
        if (load > T) {
            std::ostringstream msg;
            msg << "cell " << cell << ": minimum load " << load << " s exceeds period " << T
                << " s (deficit " << (load - T) << " s)";
            throw Infeasible(msg.str());
        }
    }

    return channels;
}

std::set<std::string> flows_in_cell(const Scenario& scenario, const std::string& cell) {
    bool known = false;
    for (const auto& c : scenario.cells)
        if (c.id == cell) {
            known = true;
            break;
        }
    if (!known)
        throw UnknownCell("flows_in_cell: unknown cell " + cell);

    std::set<std::string> result;
    for (const auto& flow : scenario.flows)
        if (std::find(flow.route.begin(), flow.route.end(), cell) != flow.route.end())
            result.insert(flow.id);
    return result;
}

}  // namespace faircode
