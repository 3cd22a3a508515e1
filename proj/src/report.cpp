#include "faircode/report.hpp"

#include <cstdio>
#include <sstream>

namespace faircode {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\')
            out += '\\';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

std::string render_report(const SolveReport& report) {
    const Allocation& a = report.allocation;
    std::ostringstream os;
    os << "{\n";
    os << "  \"status\": " << (report.converged ? "\"converged\"" : "\"max_iterations\"")
       << ",\n";
    os << "  \"iterations\": " << report.iterations << ",\n";
    os << "  \"U\": " << num(a.utility) << ",\n";
    os << "  \"U_tilde\": " << num(a.utility_tilde) << ",\n";
    os << "  \"kkt_residuals\": {\n";
    os << "    \"stationarity\": " << num(report.kkt.stationarity) << ",\n";
    os << "    \"primal_violation\": " << num(report.kkt.primal_violation) << ",\n";
    os << "    \"dual_min_price\": " << num(report.kkt.dual_min_price) << ",\n";
    os << "    \"complementary_slackness\": " << num(report.kkt.complementary_slackness)
       << "\n  },\n";

    os << "  \"flows\": [\n";
    for (std::size_t i = 0; i < a.flows.size(); ++i) {
        const auto& f = a.flows[i];
        os << "    {\"id\": " << quote(f.flow_id);
        os << ", \"x_star\": " << num(f.x_star);
        os << ", \"r_star\": " << num(f.r_star);
        os << ", \"n\": " << num(f.n_real);
        os << ", \"n_int\": " << f.n_int;
        os << ", \"e_upper\": " << num(f.e_upper);
        os << ", \"e_lower\": " << num(f.e_lower);
        os << ", \"e_exact\": " << num(f.e_exact);
        os << ", \"airtimes\": {";
        bool first = true;
        for (const auto& [cell, t] : f.airtime) {
            os << (first ? "" : ", ") << quote(cell) << ": " << num(t);
            first = false;
        }
        os << "}}" << (i + 1 < a.flows.size() ? "," : "") << "\n";
    }
    os << "  ],\n";

    os << "  \"cells\": [\n";
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        const auto& cs = a.cells[i];
        os << "    {\"id\": " << quote(cs.cell_id);
        os << ", \"price\": " << num(cs.price);
        os << ", \"slack\": " << num(cs.slack);
        os << "}" << (i + 1 < a.cells.size() ? "," : "") << "\n";
    }
    os << "  ]\n";
    os << "}\n";
    return os.str();
}

std::string render_trace_csv(const SolveReport& report) {
    std::ostringstream os;
    os << "iter";
    for (const auto& cell : report.cell_order)
        os << ",p_" << cell;
    for (const auto& cell : report.cell_order)
        os << ",slack_" << cell;
    os << ",dual,primal\n";

    for (std::size_t i = 0; i < report.trace.size(); ++i) {
        const auto& row = report.trace[i];
        os << (i + 1);
        for (double p : row.prices)
            os << "," << num(p);
        for (double s : row.slacks)
            os << "," << num(s);
        os << "," << num(row.dual) << "," << num(row.primal) << "\n";
    }
    return os.str();
}

}  // namespace faircode
