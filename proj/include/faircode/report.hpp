#pragma once

#include <string>

#include "faircode/solver.hpp"

namespace faircode {

// Renders the report as a JSON document with fixed key order and fixed
// 12-significant-digit number formatting, so identical runs produce
// byte-identical files on any platform.
std::string render_report(const SolveReport& report);

// Per-iteration trace: header "iter,p_<cell>...,slack_<cell>...,dual,primal"
// followed by one row per iteration, cells in scenario order.
std::string render_trace_csv(const SolveReport& report);

}  // namespace faircode
