#include <algorithm>
#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "bcfar/rng.hpp"

using bcfar::RngStream;
using bcfar::derive_stream;

namespace {

// One-sample Kolmogorov-Smirnov statistic against Uniform(0,1).
double ks_statistic(std::vector<double> u) {
    std::sort(u.begin(), u.end());
    const double n = static_cast<double>(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double hi = (static_cast<double>(i) + 1.0) / n - u[i];
        const double lo = u[i] - static_cast<double>(i) / n;
        d = std::max({d, hi, lo});
    }
    return d;
}

// Asymptotic KS critical value at significance 0.001: sqrt(ln(2/0.001)/2).
constexpr double kKsCrit001 = 1.9494746035204052;

}  // namespace

TEST_CASE("streams are reproducible and addressable by (seed, id)", "[rng]") {
    RngStream a = derive_stream(42, 7);
    RngStream b = derive_stream(42, 7);
    for (int i = 0; i < 64; ++i) REQUIRE(a.next_u64() == b.next_u64());

    REQUIRE(a.master_seed() == 42);
    REQUIRE(a.stream_id() == 7);

    SECTION("sequences depend only on draw count, not construction history") {
        RngStream fresh = derive_stream(42, 7);
        for (int i = 0; i < 64; ++i) fresh.next_u64();  // catch up to a
        REQUIRE(fresh.next_u64() == a.next_u64());
    }
}

TEST_CASE("distinct stream ids and seeds give distinct sequences", "[rng]") {
    auto first_words = [](std::uint64_t seed, std::uint64_t id) {
        RngStream s = derive_stream(seed, id);
        std::vector<std::uint64_t> w(4);
        for (auto& x : w) x = s.next_u64();
        return w;
    };
    REQUIRE(first_words(1, 0) != first_words(1, 1));
    REQUIRE(first_words(1, 0) != first_words(2, 0));
    // Widely spaced ids, as used by sweep grid points.
    REQUIRE(first_words(1, 0) != first_words(1, std::uint64_t{1} << 32));
    REQUIRE(first_words(1, std::uint64_t{1} << 32) != first_words(1, std::uint64_t{2} << 32));
    // Adjacent seeds with equal id must not collide either.
    REQUIRE(first_words(100, 5) != first_words(101, 5));
}

TEST_CASE("uniform draws live in (0, 1] and pass a KS test", "[rng]") {
    const std::size_t n = 100000;
    RngStream rng = derive_stream(123, 0);
    std::vector<double> u(n);
    double mean = 0.0;
    for (auto& x : u) {
        x = rng.next_uniform();
        REQUIRE(x > 0.0);
        REQUIRE(x <= 1.0);
        mean += x;
    }
    mean /= static_cast<double>(n);
    // 4 sigma of the sample mean of U(0,1): 4 / sqrt(12 n).
    REQUIRE(std::abs(mean - 0.5) < 4.0 / std::sqrt(12.0 * static_cast<double>(n)));
    REQUIRE(ks_statistic(u) < kKsCrit001 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("exponential transform is the inverse survival function", "[rng]") {
    REQUIRE(bcfar::exponential_from_uniform(2.0, 1.0) == 0.0);
    REQUIRE(bcfar::exponential_from_uniform(2.0, std::exp(-3.0)) ==
            Catch::Approx(1.5).epsilon(1e-12));
    REQUIRE(bcfar::exponential_from_uniform(0.5, std::exp(-1.0)) ==
            Catch::Approx(2.0).epsilon(1e-12));

    SECTION("parameter validation") {
        REQUIRE_THROWS_AS(bcfar::exponential_from_uniform(0.0, 0.5), std::invalid_argument);
        REQUIRE_THROWS_AS(bcfar::exponential_from_uniform(-1.0, 0.5), std::invalid_argument);
        REQUIRE_THROWS_AS(bcfar::exponential_from_uniform(
                              std::numeric_limits<double>::infinity(), 0.5),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(bcfar::exponential_from_uniform(std::nan(""), 0.5),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(bcfar::exponential_from_uniform(1.0, 0.0), std::invalid_argument);
        REQUIRE_THROWS_AS(bcfar::exponential_from_uniform(1.0, -0.5), std::invalid_argument);
        REQUIRE_THROWS_AS(bcfar::exponential_from_uniform(1.0, 1.0 + 1e-9),
                          std::invalid_argument);
    }
}

TEST_CASE("exponential samples have the right scale and shape", "[rng]") {
    const std::size_t n = 100000;
    const double rate = 2.0;
    RngStream rng = derive_stream(99, 3);
    std::vector<double> survival(n);  // exp(-rate x) is U(0,1) when x ~ Exp(rate)
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = bcfar::sample_exponential(rate, rng);
        REQUIRE(x >= 0.0);
        mean += x;
        survival[i] = std::exp(-rate * x);
    }
    mean /= static_cast<double>(n);
    // 4 sigma of the sample mean of Exp(rate): 4 / (rate sqrt(n)).
    REQUIRE(std::abs(mean - 1.0 / rate) < 4.0 / (rate * std::sqrt(static_cast<double>(n))));
    REQUIRE(ks_statistic(survival) < kKsCrit001 / std::sqrt(static_cast<double>(n)));

    REQUIRE_THROWS_AS(bcfar::sample_exponential(0.0, rng), std::invalid_argument);
    REQUIRE_THROWS_AS(bcfar::sample_exponential(-2.0, rng), std::invalid_argument);
}
