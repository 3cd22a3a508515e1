#pragma once

#include <cstdint>
#include <vector>

namespace faircode {

// A chain of binary symmetric channels, one cross-over probability per hop.
struct BscCascade {
    std::vector<double> hops;
};

// End-to-end cross-over probability of the cascade. Uses the two-state
// recurrence a <- a*(1-a_c) + (1-a)*a_c, which equals the odd-parity sum
// over all hop-error patterns at linear cost.
double cascade_crossover(const BscCascade& cascade);

// Probability that an m-bit symbol is corrupted when each bit flips
// independently with probability alpha: 1 - (1-alpha)^m.
double symbol_error(double alpha, int m);

// Probability that a bounded-distance decoder fails: P{X > (n-k)/2} with
// X ~ Binomial(n, beta). The threshold is the real number (n-k)/2 and the
// inequality strict, so the decoder corrects up to floor((n-k)/2) errors.
// Computed with log-domain terms and compensated summation.
// Throws InvalidDimensions when k < 1 or k > n or beta outside [0, 1].
double exact_packet_error(std::int64_t k, std::int64_t n, double beta);

}  // namespace faircode
