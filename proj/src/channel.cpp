#include "faircode/channel.hpp"

#include <algorithm>
#include <cmath>

#include "faircode/errors.hpp"

namespace faircode {

double cascade_crossover(const BscCascade& cascade) {
    if (cascade.hops.empty())
        throw InvalidDimensions("cascade_crossover: cascade has no hops");
    double a = 0.0;
    for (double ac : cascade.hops) {
        if (!(ac >= 0.0 && ac <= 1.0))
            throw InvalidDimensions("cascade_crossover: hop cross-over outside [0, 1]");
        a = a * (1.0 - ac) + (1.0 - a) * ac;
    }
    return a;
}

double symbol_error(double alpha, int m) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw InvalidDimensions("symbol_error: alpha outside [0, 1]");
    if (m < 1)
        throw InvalidDimensions("symbol_error: m must be >= 1");
    if (alpha == 1.0)
        return 1.0;
    // 1 - (1-a)^m via expm1/log1p so tiny alpha keeps full precision.
    return -std::expm1(static_cast<double>(m) * std::log1p(-alpha));
}

double exact_packet_error(std::int64_t k, std::int64_t n, double beta) {
    if (k < 1 || k > n)
        throw InvalidDimensions("exact_packet_error: need 1 <= k <= n");
    if (!(beta >= 0.0 && beta <= 1.0))
        throw InvalidDimensions("exact_packet_error: beta outside [0, 1]");

    // Smallest error count strictly above (n-k)/2. Integer floor + 1 handles
    // both parities of n-k.
    const std::int64_t t0 = (n - k) / 2 + 1;
    if (beta == 0.0)
        return 0.0;
    if (beta == 1.0)
        return 1.0;  // t0 <= n always holds for k >= 1

    const double lb = std::log(beta);
    const double l1b = std::log1p(-beta);
    const double nd = static_cast<double>(n);

    auto log_term_first = std::lgamma(nd + 1.0) - std::lgamma(static_cast<double>(t0) + 1.0) -
                          std::lgamma(static_cast<double>(n - t0) + 1.0) +
                          static_cast<double>(t0) * lb + static_cast<double>(n - t0) * l1b;

    // Pass 1: peak of the tail terms (the summand is unimodal).
    double lmax = log_term_first;
    {
        double lt = log_term_first;
        for (std::int64_t i = t0; i < n; ++i) {
            lt += std::log(static_cast<double>(n - i) / static_cast<double>(i + 1)) + lb - l1b;
            lmax = std::max(lmax, lt);
        }
    }

    // Pass 2: compensated sum of exp(term - peak).
    double sum = 0.0, comp = 0.0;
    {
        double lt = log_term_first;
        for (std::int64_t i = t0;; ++i) {
            const double y = std::exp(lt - lmax) - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            if (i == n)
                break;
            lt += std::log(static_cast<double>(n - i) / static_cast<double>(i + 1)) + lb - l1b;
        }
    }

    return std::min(1.0, std::exp(lmax + std::log(sum)));
}

}  // namespace faircode
