#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "faircode/channel.hpp"
#include "faircode/errors.hpp"

using namespace faircode;

namespace {

// Literal tail P{#errors > (n-k)/2} over all 2^n error patterns; the
// threshold is the real number (n-k)/2, so odd n-k rounds up implicitly.
double tail_by_enumeration(int k, int n, double beta) {
    const double threshold = (n - k) / 2.0;
    double p = 0.0;
    for (std::uint32_t pattern = 0; pattern < (1u << n); ++pattern) {
        const int errors = std::popcount(pattern);
        if (errors > threshold)
            p += std::pow(beta, errors) * std::pow(1.0 - beta, n - errors);
    }
    return p;
}

}  // namespace

TEST_CASE("cascade_crossover on known cascades") {
    CHECK(cascade_crossover({{0.07}}) == doctest::Approx(0.07).epsilon(1e-15));
    CHECK(cascade_crossover({{0.5, 0.123}}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(cascade_crossover({{0.1, 0.1}}) == doctest::Approx(0.18).epsilon(1e-14));
    CHECK(cascade_crossover({{0.1, 0.2, 0.05}}) == doctest::Approx(0.284).epsilon(1e-14));
}

TEST_CASE("cascade_crossover is permutation invariant") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> dist(0.0, 0.5);
    for (int trial = 0; trial < 50; ++trial) {
        BscCascade cascade;
        const int hops = 2 + static_cast<int>(gen() % 7);
        for (int h = 0; h < hops; ++h)
            cascade.hops.push_back(dist(gen));
        const double reference = cascade_crossover(cascade);
        BscCascade shuffled = cascade;
        std::shuffle(shuffled.hops.begin(), shuffled.hops.end(), gen);
        CHECK(cascade_crossover(shuffled) == doctest::Approx(reference).epsilon(1e-13));
    }
}

TEST_CASE("cascade extension: zero hop is identity, hops <= 0.5 never help") {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> dist(0.0, 0.5);
    for (int trial = 0; trial < 50; ++trial) {
        BscCascade cascade;
        cascade.hops.push_back(dist(gen));
        double worst = cascade.hops[0];
        for (int h = 0; h < 6; ++h) {
            const double before = cascade_crossover(cascade);
            cascade.hops.push_back(0.0);
            CHECK(cascade_crossover(cascade) == before);
            cascade.hops.back() = dist(gen);
            worst = std::max(worst, cascade.hops.back());
            const double after = cascade_crossover(cascade);
            CHECK(after >= worst - 1e-15);
            CHECK(after <= 0.5 + 1e-15);
        }
    }
}

TEST_CASE("symbol_error basics") {
    CHECK(symbol_error(0.37, 1) == doctest::Approx(0.37).epsilon(1e-15));
    CHECK(symbol_error(0.0, 13) == 0.0);
    CHECK(symbol_error(1.0, 3) == 1.0);
    CHECK(symbol_error(0.18, 2) == doctest::Approx(0.3276).epsilon(1e-14));
    // tiny alpha: relative precision survives where 1-(1-a)^m would not
    CHECK(symbol_error(1e-12, 8) == doctest::Approx(8e-12).epsilon(1e-9));
}

TEST_CASE("exact_packet_error on known values") {
    CHECK(exact_packet_error(10, 20, 0.0) == 0.0);
    CHECK(exact_packet_error(10, 20, 1.0) == 1.0);
    CHECK(exact_packet_error(2, 4, 0.5) == doctest::Approx(0.6875).epsilon(1e-14));
    CHECK(exact_packet_error(10, 20, 0.05) ==
          doctest::Approx(0.00032929432452827655).epsilon(1e-12));
    // deep tail: log-domain summation keeps this finite and accurate
    CHECK(exact_packet_error(100, 200, 0.02) ==
          doctest::Approx(1.5731975792623549e-40).epsilon(1e-12));
}

TEST_CASE("exact_packet_error agrees with 2^n enumeration up to n = 12") {
    for (int n : {4, 7, 9, 12}) {
        for (int k = 1; k <= n; ++k) {
            for (double beta : {0.05, 0.3, 0.7}) {
                const double exact = exact_packet_error(k, n, beta);
                CHECK(exact == doctest::Approx(tail_by_enumeration(k, n, beta)).epsilon(1e-12));
                CHECK(exact >= 0.0);
                CHECK(exact <= 1.0);
            }
        }
    }
}

TEST_CASE("exact_packet_error is nondecreasing in beta") {
    for (auto [k, n] : std::vector<std::pair<int, int>>{{10, 24}, {3, 17}, {50, 120}}) {
        double previous = 0.0;
        for (int i = 1; i <= 99; ++i) {
            // tolerance sized to the lgamma noise in the tail sum, not to ulps
            const double value = exact_packet_error(k, n, i / 100.0);
            CHECK(value >= previous - 1e-12);
            previous = value;
        }
    }
}

TEST_CASE("exact_packet_error is nonincreasing in n along fixed parity") {
    // Redundancy helps only in pairs: going n -> n+1 adds a trial without
    // raising the correction radius, which can increase the tail. Along
    // n -> n+2 the radius grows by one and the tail never increases.
    for (double beta : {0.02, 0.2, 0.45}) {
        for (int k : {2, 5, 10}) {
            for (int start : {k, k + 1}) {
                double previous = 1.0;
                for (int n = start; n <= start + 60; n += 2) {
                    const double value = exact_packet_error(k, n, beta);
                    CHECK(value <= previous + 1e-12);
                    previous = value;
                }
            }
        }
    }
}

TEST_CASE("channel argument guards") {
    CHECK_THROWS_AS(cascade_crossover({{}}), InvalidDimensions);
    CHECK_THROWS_AS(cascade_crossover({{0.1, 1.2}}), InvalidDimensions);
    CHECK_THROWS_AS(symbol_error(-0.1, 2), InvalidDimensions);
    CHECK_THROWS_AS(symbol_error(0.1, 0), InvalidDimensions);
    CHECK_THROWS_AS(exact_packet_error(0, 10, 0.1), InvalidDimensions);
    CHECK_THROWS_AS(exact_packet_error(11, 10, 0.1), InvalidDimensions);
    CHECK_THROWS_AS(exact_packet_error(5, 10, 1.5), InvalidDimensions);
}
