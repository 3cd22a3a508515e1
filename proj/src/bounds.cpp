#include "faircode/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "faircode/errors.hpp"

namespace faircode {

namespace {

void require_admissible(const BoundInput& in) {
    if (in.k < 1)
        throw InvalidDimensions("bound input: k must be >= 1");
    if (!(in.beta > 0.0 && in.beta < 0.5))
        throw InvalidDimensions("bound input: beta must lie in (0, 0.5)");
    if (!(in.x >= 0.0 && in.x < 0.5))
        throw InvalidDimensions("bound input: x must lie in [0, 0.5)");
}

// Grid shared by exact_convexity_check and min_k_for_convexity so the two
// agree point for point: 10001 uniform nodes plus 100 extra nodes inside
// each of the first and last cells (the bracket is worst near the ends).
std::vector<double> convexity_grid(double x_lo, double x_hi) {
    constexpr int kUniform = 10000;  // intervals; 10001 nodes
    constexpr int kEndRefine = 100;
    std::vector<double> xs;
    xs.reserve(kUniform + 1 + 2 * kEndRefine);
    const double h = (x_hi - x_lo) / kUniform;
    for (int i = 0; i <= kUniform; ++i)
        xs.push_back(x_lo + h * i);
    for (int j = 1; j < kEndRefine; ++j) {
        xs.push_back(x_lo + h * j / kEndRefine);
        xs.push_back(x_hi - h * j / kEndRefine);
    }
    return xs;
}

// k needed for a nonnegative bracket at one x:
// k >= 4(1-2x)/Lambda + (1-2x)^3/(x(1-x)Lambda^2).
double k_required(double x, double beta) {
    const double u = 1.0 - 2.0 * x;
    const double lam = capital_lambda(x, beta);
    return 4.0 * u / lam + u * u * u / (x * (1.0 - x) * lam * lam);
}

}  // namespace

double rate_function(double x, double theta, double beta) {
    if (!(beta > 0.0 && beta < 1.0))
        throw InvalidDimensions("rate_function: beta must lie in (0, 1)");
    return theta * x - std::log1p(beta * std::expm1(theta));
}

double chernoff_upper(const BoundInput& in, double theta) {
    require_admissible(in);
    if (!(theta > 0.0))
        throw InvalidDimensions("chernoff_upper: theta must be > 0");
    const double n = static_cast<double>(in.k) / (1.0 - 2.0 * in.x);
    return std::exp(-n * rate_function(in.x, theta, in.beta));
}

double optimal_theta(double x, double beta) {
    if (!(beta > 0.0 && beta < 1.0))
        throw InvalidDimensions("optimal_theta: beta must lie in (0, 1)");
    if (!(x > beta))
        throw NoRecovery("optimal_theta: x <= beta, coding rate cannot beat the symbol error rate");
    if (!(x < 0.5))
        throw InvalidDimensions("optimal_theta: x must be < 0.5");
    return std::log(x * (1.0 - beta) / (beta * (1.0 - x)));
}

double kl_exponent_upper(const BoundInput& in) {
    require_admissible(in);
    if (!(in.x > in.beta))
        throw NoRecovery("kl_exponent_upper: x <= beta");
    const double n = static_cast<double>(in.k) / (1.0 - 2.0 * in.x);
    return std::exp(-n * bernoulli_kl(in.x, in.beta));
}

double lower_bound(const BoundInput& in) {
    require_admissible(in);
    if (!(in.x > in.beta))
        throw NoRecovery("lower_bound: x <= beta");
    const double n = static_cast<double>(in.k) / (1.0 - 2.0 * in.x);
    const double exponent = bernoulli_entropy(in.x) + bernoulli_kl(in.x, in.beta);
    return in.beta / (1.0 - in.beta) * std::exp(-n * exponent);
}

double bernoulli_kl(double x, double beta) {
    if (!(x > 0.0 && x < 1.0 && beta > 0.0 && beta < 1.0))
        throw InvalidDimensions("bernoulli_kl: arguments must lie in (0, 1)");
    // log1p of the relative offsets keeps precision when x is near beta.
    const double d = x - beta;
    return x * std::log1p(d / beta) + (1.0 - x) * std::log1p(-d / (1.0 - beta));
}

double bernoulli_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw InvalidDimensions("bernoulli_entropy: argument must lie in [0, 1]");
    double h = 0.0;
    if (x > 0.0)
        h -= x * std::log(x);
    if (x < 1.0)
        h -= (1.0 - x) * std::log1p(-x);
    return h;
}

double capital_lambda(double x, double beta) {
    return std::log(x * (1.0 - x)) - std::log(beta * (1.0 - beta));
}

double convexity_margin(std::int64_t k, double x, double beta, double k0) {
    const double u = 1.0 - 2.0 * x;
    const double lam = capital_lambda(x, beta);
    return static_cast<double>(k) - (4.0 * u / lam + k0 * k0 * u * u * u / (x * (1.0 - x)));
}

double convexity_bracket(std::int64_t k, double x, double beta) {
    const double u = 1.0 - 2.0 * x;
    const double lam = capital_lambda(x, beta);
    return static_cast<double>(k) * lam * lam / (u * u) - 4.0 * lam / u - u / (x * (1.0 - x));
}

bool exact_convexity_check(std::int64_t k, double beta, double x_lo, double x_hi) {
    if (!(beta > 0.0 && beta < x_lo && x_lo < x_hi && x_hi < 0.5))
        throw InvalidDimensions("exact_convexity_check: need beta < x_lo < x_hi < 0.5");
    for (double x : convexity_grid(x_lo, x_hi))
        if (convexity_bracket(k, x, beta) < 0.0)
            return false;
    return true;
}

std::int64_t min_k_for_convexity(double beta, double epsilon) {
    if (!(beta > 0.0 && beta < 0.5))
        throw InvalidDimensions("min_k_for_convexity: beta must lie in (0, 0.5)");
    if (!(epsilon > 0.0))
        throw InvalidDimensions("min_k_for_convexity: epsilon must be > 0");
    const double x_lo = beta + epsilon;
    const double x_hi = 0.5 - 1e-6;
    if (!(x_lo < x_hi))
        return 1;  // empty interval, check is vacuous

    // The bracket is linear in k with positive slope, so the answer is the
    // ceiling of the grid supremum of k_required; the verify loop absorbs
    // any last-ulp disagreement with exact_convexity_check.
    double sup = 1.0;
    for (double x : convexity_grid(x_lo, x_hi))
        sup = std::max(sup, k_required(x, beta));
    auto k = static_cast<std::int64_t>(std::ceil(sup));
    if (k < 1)
        k = 1;
    while (!exact_convexity_check(k, beta, x_lo, x_hi))
        ++k;
    while (k > 1 && exact_convexity_check(k - 1, beta, x_lo, x_hi))
        --k;
    return k;
}

}  // namespace faircode
