#pragma once

#include <cstdint>

namespace faircode {

// Arguments common to the error-probability bounds: k information symbols,
// rate parameter x = (1-r)/2, end-to-end symbol error probability beta.
struct BoundInput {
    std::int64_t k = 0;
    double x = 0.0;
    double beta = 0.0;
};

// Large-deviations rate function of a Bernoulli(beta) variable:
// I(x; theta) = theta*x - ln(1 - beta + beta*e^theta).
double rate_function(double x, double theta, double beta);

// Chernoff bound exp(-(k/(1-2x)) * I(x; theta)). Valid for any theta > 0;
// exceeds 1 when the exponent goes negative (vacuous but correct).
double chernoff_upper(const BoundInput& in, double theta);

// The minimising Chernoff parameter theta* = ln(x/beta) - ln((1-x)/(1-beta)).
// Throws NoRecovery when x <= beta (theta* collapses to 0, bound to 1).
double optimal_theta(double x, double beta);

// Tight form of the upper bound: exp(-(k/(1-2x)) * D(B(x)||B(beta))).
// Equals chernoff_upper at theta = optimal_theta.
double kl_exponent_upper(const BoundInput& in);

// Matching lower bound:
// (beta/(1-beta)) * exp(-(k/(1-2x)) * (H(B(x)) + D(B(x)||B(beta)))).
double lower_bound(const BoundInput& in);

// D(B(x)||B(beta)) in nats.
double bernoulli_kl(double x, double beta);

// H(B(x)) in nats, with 0*ln 0 := 0.
double bernoulli_entropy(double x);

// Lambda(x) = ln(x(1-x)/(beta(1-beta))), the log ratio appearing in the
// stationarity condition and the convexity bracket. Positive for x > beta.
double capital_lambda(double x, double beta);

// Margin of the sufficient convexity condition
//   4(1-2x)/Lambda + k0^2 (1-2x)^3/(x(1-x)) <= k,
// returned as k minus the left side; k0 = 1/Lambda(x_lower).
double convexity_margin(std::int64_t k, double x, double beta, double k0);

// Second derivative of the optimised upper bound, up to the positive factor
// e * k/(1-2x)^2:  k Lambda^2/(1-2x)^2 - 4 Lambda/(1-2x) - (1-2x)/(x(1-x)).
// Nonnegative bracket <=> convexity at x.
double convexity_bracket(std::int64_t k, double x, double beta);

// True iff the bracket is >= 0 on a dense grid (>= 10^4 points, with extra
// refinement inside the first and last grid cells) over [x_lo, x_hi].
bool exact_convexity_check(std::int64_t k, double beta, double x_lo, double x_hi);

// Smallest integer k for which exact_convexity_check(k, beta, beta+epsilon,
// 0.5-1e-6) holds. Returns 1 when the interval is empty (vacuous check).
std::int64_t min_k_for_convexity(double beta, double epsilon);

}  // namespace faircode
