#pragma once

#include <string>

#include "faircode/model.hpp"

namespace faircode {

// Parses the scenario document:
//   {"cells": [{"id", "period_s"}],
//    "flows": [{"id", "route", "k", "m", "alpha": {cell: a} | "beta", "w": {cell: w}}],
//    "rate_bounds": {flow: {"x_lower"?, "x_upper"?}}}   (optional)
// Field names are exact; unknown fields are rejected. Structural problems
// raise ParseError; semantic checks happen later in validate().
Scenario parse_scenario(const std::string& json_text);

Scenario load_scenario(const std::string& path);

}  // namespace faircode
