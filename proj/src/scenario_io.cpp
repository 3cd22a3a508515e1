#include "faircode/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "faircode/errors.hpp"

namespace faircode {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool ok = false;
        for (const char* a : allowed)
            ok = ok || key == a;
        if (!ok)
            throw ParseError(where + ": unknown field \"" + key + "\"");
    }
}

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError(where + ": missing field \"" + key + "\"");
    return *it;
}

double require_number(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number())
        throw ParseError(where + ": field \"" + key + "\" must be a number");
    return v.get<double>();
}

std::int64_t require_integer(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number_integer())
        throw ParseError(where + ": field \"" + key + "\" must be an integer");
    return v.get<std::int64_t>();
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_string())
        throw ParseError(where + ": field \"" + key + "\" must be a string");
    return v.get<std::string>();
}

std::map<std::string, double> number_map(const json& v, const std::string& where) {
    if (!v.is_object())
        throw ParseError(where + " must be an object of cell: value");
    std::map<std::string, double> out;
    for (const auto& [cell, value] : v.items()) {
        if (!value.is_number())
            throw ParseError(where + ": value for cell \"" + cell + "\" must be a number");
        out[cell] = value.get<double>();
    }
    return out;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
    if (!doc.is_object())
        throw ParseError("scenario: top level must be an object");
    reject_unknown_keys(doc, {"cells", "flows", "rate_bounds"}, "scenario");

    Scenario sc;

    const json& cells = require(doc, "cells", "scenario");
    if (!cells.is_array())
        throw ParseError("scenario: \"cells\" must be an array");
    for (const auto& cj : cells) {
        if (!cj.is_object())
            throw ParseError("cells: entries must be objects");
        reject_unknown_keys(cj, {"id", "period_s"}, "cell");
        CellSpec cell;
        cell.id = require_string(cj, "id", "cell");
        cell.period_s = require_number(cj, "period_s", "cell " + cell.id);
        sc.cells.push_back(std::move(cell));
    }

    const json& flows = require(doc, "flows", "scenario");
    if (!flows.is_array())
        throw ParseError("scenario: \"flows\" must be an array");
    for (const auto& fj : flows) {
        if (!fj.is_object())
            throw ParseError("flows: entries must be objects");
        reject_unknown_keys(fj, {"id", "route", "k", "m", "alpha", "beta", "w"}, "flow");
        FlowSpec flow;
        flow.id = require_string(fj, "id", "flow");
        const std::string where = "flow " + flow.id;

        const json& route = require(fj, "route", where);
        if (!route.is_array() || route.empty())
            throw ParseError(where + ": \"route\" must be a non-empty array of cell ids");
        for (const auto& cj : route) {
            if (!cj.is_string())
                throw ParseError(where + ": route entries must be strings");
            flow.route.push_back(cj.get<std::string>());
        }

        flow.packet_size = require_integer(fj, "k", where);
        const std::int64_t m = require_integer(fj, "m", where);
        if (m < 1 || m > 64)
            throw ParseError(where + ": m must be in [1, 64]");
        flow.bits_per_symbol = static_cast<int>(m);

        const bool has_alpha = fj.contains("alpha");
        const bool has_beta = fj.contains("beta");
        if (has_alpha == has_beta)
            throw ParseError(where + ": specify exactly one of \"alpha\" or \"beta\"");
        if (has_alpha)
            flow.per_hop_crossover = number_map(fj["alpha"], where + ": \"alpha\"");
        else {
            if (!fj["beta"].is_number())
                throw ParseError(where + ": \"beta\" must be a number");
            flow.direct_beta = fj["beta"].get<double>();
        }

        flow.phy_rate = number_map(require(fj, "w", where), where + ": \"w\"");
        sc.flows.push_back(std::move(flow));
    }

    if (doc.contains("rate_bounds")) {
        const json& rb = doc["rate_bounds"];
        if (!rb.is_object())
            throw ParseError("scenario: \"rate_bounds\" must be an object keyed by flow id");
        for (const auto& [flow_id, bj] : rb.items()) {
            if (!bj.is_object())
                throw ParseError("rate_bounds for flow " + flow_id + " must be an object");
            reject_unknown_keys(bj, {"x_lower", "x_upper"}, "rate_bounds for flow " + flow_id);
            RateBoundsOverride rbo;
            if (bj.contains("x_lower")) {
                if (!bj["x_lower"].is_number())
                    throw ParseError("rate_bounds for flow " + flow_id +
                                     ": \"x_lower\" must be a number");
                rbo.x_lower = bj["x_lower"].get<double>();
            }
            if (bj.contains("x_upper")) {
                if (!bj["x_upper"].is_number())
                    throw ParseError("rate_bounds for flow " + flow_id +
                                     ": \"x_upper\" must be a number");
                rbo.x_upper = bj["x_upper"].get<double>();
            }
            sc.rate_bounds.emplace(flow_id, rbo);
        }
    }

    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open scenario file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

}  // namespace faircode
