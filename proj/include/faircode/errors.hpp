#pragma once

#include <stdexcept>
#include <string>

namespace faircode {

// Error taxonomy used across the library. Everything derives from
// std::runtime_error so callers can catch broadly; the CLI maps each
// type onto its exit-code contract.

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnknownCell : std::runtime_error {
    explicit UnknownCell(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateChannel : std::runtime_error {
    explicit DegenerateChannel(const std::string& msg) : std::runtime_error(msg) {}
};

struct Infeasible : std::runtime_error {
    explicit Infeasible(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested rate parameter does not beat the raw symbol error rate; the
// Chernoff machinery degenerates (theta* -> 0, bound -> 1), so we refuse
// rather than hand back a vacuous number.
struct NoRecovery : std::runtime_error {
    explicit NoRecovery(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericalFailure : std::runtime_error {
    explicit NumericalFailure(const std::string& msg) : std::runtime_error(msg) {}
};

struct TooLarge : std::runtime_error {
    explicit TooLarge(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidDimensions : std::runtime_error {
    explicit InvalidDimensions(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace faircode
