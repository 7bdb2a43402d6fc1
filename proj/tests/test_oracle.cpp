#include <cmath>
#include <stdexcept>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "bcfar/oracle.hpp"
#include "bcfar/quadrature.hpp"
#include "naive_reference.hpp"

using bcfar::ClutterRangeProfile;
using bcfar::DetectorSpec;
using bcfar::InterferencePrior;
namespace oracle = bcfar::oracle;

namespace {

ClutterRangeProfile random_crp(std::size_t n, bcfar::RngStream& rng) {
    std::vector<double> z(n);
    for (auto& v : z) v = bcfar::sample_exponential(1.0, rng);
    return ClutterRangeProfile(std::move(z));
}

double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace

// ---------------------------------------------------------------------------
// Quadrature engine
// ---------------------------------------------------------------------------

TEST_CASE("adaptive panels integrate smooth functions to tolerance", "[quadrature]") {
    auto square = [](double x) { return x * x; };
    REQUIRE(bcfar::integrate_adaptive(square, 0.0, 1.0).value ==
            Catch::Approx(1.0 / 3.0).epsilon(1e-13));

    auto sine = [](double x) { return std::sin(x); };
    REQUIRE(bcfar::integrate_adaptive(sine, 0.0, std::acos(-1.0)).value ==
            Catch::Approx(2.0).epsilon(1e-10));

    SECTION("integrable endpoint spike needs subdivision but converges") {
        auto spike = [](double x) { return 0.5 / std::sqrt(x); };
        const auto r = bcfar::integrate_adaptive(spike, 1e-8, 1.0, 1e-10, 10000);
        REQUIRE(r.value == Catch::Approx(1.0 - 1e-4).epsilon(1e-9));
        REQUIRE(r.subdivisions > 0);
    }
    SECTION("degenerate and invalid inputs") {
        auto one = [](double) { return 1.0; };
        REQUIRE(bcfar::integrate_adaptive(one, 2.0, 2.0).value == 0.0);
        REQUIRE_THROWS_AS(bcfar::integrate_adaptive(one, 1.0, 0.0), std::invalid_argument);
        REQUIRE_THROWS_AS(bcfar::integrate_adaptive(one, 0.0, 1.0, 0.0), std::invalid_argument);
    }
}

TEST_CASE("semi-infinite integration handles exponential and power-law tails",
          "[quadrature]") {
    auto exp_decay = [](double x) { return std::exp(-x); };
    REQUIRE(bcfar::integrate_to_infinity(exp_decay, 0.0, 1.0).value ==
            Catch::Approx(1.0).epsilon(1e-9));

    auto inv_square = [](double x) { return 1.0 / (x * x); };
    REQUIRE(bcfar::integrate_to_infinity(inv_square, 1.0, 1.0).value ==
            Catch::Approx(1.0).epsilon(1e-9));

    auto heavy = [](double x) { return std::pow(x, -1.5); };
    REQUIRE(bcfar::integrate_to_infinity(heavy, 1.0, 1.0).value ==
            Catch::Approx(2.0).epsilon(1e-9));

    REQUIRE_THROWS_AS(bcfar::integrate_to_infinity(exp_decay, 0.0, 0.0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(bcfar::integrate_to_infinity(exp_decay, 0.0, 1.0, 0.0),
                      std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Predictive densities
// ---------------------------------------------------------------------------

TEST_CASE("density values at hand-computed points", "[density]") {
    const ClutterRangeProfile crp({1.0, 2.0, 3.0});
    // 3 * 6^3 / 8^4, a dyadic rational, so the comparison is tight.
    REQUIRE(oracle::predictive_density_ca(2.0, crp) ==
            Catch::Approx(0.158203125).epsilon(1e-12));
    // Excluded-sum S' = 3, N = 3, z0 = 0: 2 * 9 / 27.
    REQUIRE(oracle::predictive_density_case1(0.0, ClutterRangeProfile({1.0, 2.0, 7.0}), 3) ==
            Catch::Approx(2.0 / 3.0).epsilon(1e-12));
    // = 2989/11695.
    REQUIRE(oracle::predictive_density_case2(1.0, crp, InterferencePrior::uniform(3)) ==
            Catch::Approx(0.25557930739632323).epsilon(1e-12));
    // = 47862977/322584640.
    REQUIRE(oracle::predictive_density_case3(2.0, crp,
                                             InterferencePrior::absent_uniform(0.5, 3)) ==
            Catch::Approx(0.14837339124392285).epsilon(1e-12));
}

TEST_CASE("densities reduce into one another like the curves do", "[density]") {
    bcfar::RngStream rng = bcfar::derive_stream(21, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 3 + rng.next_u64() % 6;
        const auto crp = random_crp(n, rng);
        const double z0 = 2.0 * crp.total() * rng.next_uniform();
        const std::size_t j = 1 + rng.next_u64() % n;

        REQUIRE(rel_diff(oracle::predictive_density_case2(
                             z0, crp, InterferencePrior::point_mass(j, n)),
                         oracle::predictive_density_case1(z0, crp, j)) < 1e-12);

        std::vector<double> w(n, 1.0 / static_cast<double>(n));
        REQUIRE(rel_diff(oracle::predictive_density_case3(
                             z0, crp, InterferencePrior::with_absence_mass(0.0, w)),
                         oracle::predictive_density_case2(z0, crp,
                                                          InterferencePrior(false, w))) < 1e-12);

        std::vector<double> only_absent(n + 1, 0.0);
        only_absent[0] = 1.0;
        REQUIRE(rel_diff(oracle::predictive_density_case3(
                             z0, crp, InterferencePrior(true, only_absent)),
                         oracle::predictive_density_ca(z0, crp)) < 1e-12);
    }
}

TEST_CASE("densities agree with the plain linear-domain reference", "[density]") {
    bcfar::RngStream rng = bcfar::derive_stream(22, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 3 + rng.next_u64() % 6;
        std::vector<double> z(n);
        for (auto& v : z) v = bcfar::sample_exponential(1.0, rng);
        const ClutterRangeProfile crp(z);
        std::vector<double> w(n);
        double sum = 0.0;
        for (auto& v : w) {
            v = bcfar::sample_exponential(1.0, rng);
            sum += v;
        }
        for (auto& v : w) v /= sum * 2.0;  // cell mass 1/2
        const double z0 = 2.0 * crp.total() * rng.next_uniform();
        const std::size_t j = 1 + rng.next_u64() % n;

        REQUIRE(rel_diff(oracle::predictive_density_ca(z0, crp), naive::ca_density(z, z0)) <
                1e-10);
        REQUIRE(rel_diff(oracle::predictive_density_case1(z0, crp, j),
                         naive::case1_density(z, z0, j)) < 1e-10);
        std::vector<double> w_full = w;
        for (auto& v : w_full) v *= 2.0;
        REQUIRE(rel_diff(oracle::predictive_density_case2(z0, crp,
                                                          InterferencePrior(false, w_full)),
                         naive::case2_density(z, z0, w_full)) < 1e-10);
        REQUIRE(rel_diff(oracle::predictive_density_case3(
                             z0, crp, InterferencePrior::with_absence_mass(0.5, w)),
                         naive::case3_density(z, z0, 0.5, w)) < 1e-10);
    }
}

TEST_CASE("density argument validation", "[density]") {
    const ClutterRangeProfile crp({1.0, 2.0, 3.0});
    REQUIRE_THROWS_AS(oracle::predictive_density_case1(1.0, crp, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(oracle::predictive_density_case1(1.0, crp, 4), std::invalid_argument);
    REQUIRE_THROWS_AS(oracle::predictive_density_case2(1.0, crp, InterferencePrior::uniform(4)),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(
        oracle::predictive_density_case2(1.0, crp, InterferencePrior::absent_uniform(0.5, 3)),
        std::invalid_argument);
    REQUIRE_THROWS_AS(
        oracle::predictive_density_case3(1.0, crp, InterferencePrior::uniform(3)),
        std::invalid_argument);
    REQUIRE_THROWS_AS(oracle::predictive_density_ca(-1.0, crp), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Quadrature of densities vs closed forms
// ---------------------------------------------------------------------------

TEST_CASE("integrated densities reproduce the closed-form curves", "[oracle]") {
    SECTION("known-interferer point") {
        const ClutterRangeProfile crp({1.0, 2.0, 5.0});
        const auto spec = DetectorSpec::case1(0.25, 3);
        REQUIRE(oracle::quadrature_pfa(3.0, spec, crp) == Catch::Approx(0.25).epsilon(1e-8));
    }
    SECTION("mixture point") {
        const ClutterRangeProfile crp({1.0, 2.0, 3.0});
        const auto spec = DetectorSpec::case2(0.01, InterferencePrior::uniform(3));
        REQUIRE(oracle::quadrature_pfa(1.0, spec, crp) ==
                Catch::Approx(0.6336041043180847).epsilon(1e-6));
    }
    SECTION("every density integrates to one") {
        bcfar::RngStream rng = bcfar::derive_stream(23, 0);
        for (std::size_t n : {3, 8}) {
            const auto crp = random_crp(n, rng);
            const std::vector<DetectorSpec> specs = {
                DetectorSpec::ca_cfar(0.01),
                DetectorSpec::case1(0.01, 1 + n / 2),
                DetectorSpec::case2(0.01, InterferencePrior::uniform(n)),
                DetectorSpec::case3(0.01, InterferencePrior::absent_uniform(0.5, n)),
            };
            for (const auto& spec : specs) {
                REQUIRE(oracle::quadrature_pfa(0.0, spec, crp) ==
                        Catch::Approx(1.0).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("each density is the negated slope of its curve", "[oracle]") {
    bcfar::RngStream rng = bcfar::derive_stream(24, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 4 + rng.next_u64() % 8;
        const auto crp = random_crp(n, rng);
        const double s = crp.total();
        const double tau = (0.2 + 2.0 * rng.next_uniform()) * s;
        const double h = 1e-5 * (tau + s);  // step scaled to the problem's length scale
        const std::size_t j = 1 + rng.next_u64() % n;
        const auto uniform = InterferencePrior::uniform(n);
        const auto mixed = InterferencePrior::absent_uniform(0.5, n);

        const double slope_ca =
            (bcfar::ca_cfar_pfa(tau - h, crp) - bcfar::ca_cfar_pfa(tau + h, crp)) / (2.0 * h);
        REQUIRE(rel_diff(slope_ca, oracle::predictive_density_ca(tau, crp)) < 1e-6);

        const double slope_c1 =
            (bcfar::case1_pfa(tau - h, crp, j) - bcfar::case1_pfa(tau + h, crp, j)) / (2.0 * h);
        REQUIRE(rel_diff(slope_c1, oracle::predictive_density_case1(tau, crp, j)) < 1e-6);

        const double slope_c2 = (bcfar::case2_pfa(tau - h, crp, uniform) -
                                 bcfar::case2_pfa(tau + h, crp, uniform)) /
                                (2.0 * h);
        REQUIRE(rel_diff(slope_c2, oracle::predictive_density_case2(tau, crp, uniform)) < 1e-6);

        const double slope_c3 =
            (bcfar::case3_pfa(tau - h, crp, mixed) - bcfar::case3_pfa(tau + h, crp, mixed)) /
            (2.0 * h);
        REQUIRE(rel_diff(slope_c3, oracle::predictive_density_case3(tau, crp, mixed)) < 1e-6);
    }
}

TEST_CASE("quadrature settings propagate and budgets bind", "[oracle]") {
    const ClutterRangeProfile crp({1.0, 2.0, 3.0});
    const auto spec = DetectorSpec::case2(0.01, InterferencePrior::uniform(3));

    oracle::QuadratureSettings starved;
    starved.rel_tol = 1e-15;
    starved.max_subdivisions = 0;
    REQUIRE_THROWS_AS(oracle::quadrature_pfa(0.5, spec, crp, starved), std::runtime_error);

    oracle::QuadratureSettings loose;
    loose.rel_tol = 1e-4;
    REQUIRE(oracle::quadrature_pfa(1.0, spec, crp, loose) ==
            Catch::Approx(0.6336041043180847).epsilon(1e-3));
}

// ---------------------------------------------------------------------------
// Monte-Carlo false-alarm estimation
// ---------------------------------------------------------------------------

TEST_CASE("mc_pfa preconditions", "[mc]") {
    const auto spec = DetectorSpec::ca_cfar(0.05);
    bcfar::sim::Scenario sc;
    sc.n_cells = 4;

    REQUIRE_THROWS_AS(oracle::mc_pfa(spec, sc, 0, bcfar::derive_stream(1, 0)),
                      std::invalid_argument);

    bcfar::sim::Scenario with_target = sc;
    with_target.target_present = true;
    REQUIRE_THROWS_AS(oracle::mc_pfa(spec, with_target, 100, bcfar::derive_stream(1, 0)),
                      std::invalid_argument);
}

TEST_CASE("mc_pfa is reproducible and worker-count independent", "[mc]") {
    const auto spec = DetectorSpec::case2(0.05, InterferencePrior::uniform(8));
    bcfar::sim::Scenario sc;
    sc.n_cells = 8;
    const std::uint64_t trials = 200000;  // spans four chunks

    const auto a = oracle::mc_pfa(spec, sc, trials, bcfar::derive_stream(42, 0));
    const auto b = oracle::mc_pfa(spec, sc, trials, bcfar::derive_stream(42, 0));
    const auto c = oracle::mc_pfa(spec, sc, trials, bcfar::derive_stream(42, 0), 3);
    REQUIRE(a.declared == b.declared);
    REQUIRE(a.declared == c.declared);
    REQUIRE(a.estimate == c.estimate);

    SECTION("different stream ids draw different trials") {
        const auto d = oracle::mc_pfa(spec, sc, trials, bcfar::derive_stream(42, 1 << 20));
        REQUIRE(d.declared != a.declared);  // equal counts would be a 1-in-thousands fluke
    }
    SECTION("report invariants") {
        REQUIRE(a.declared <= a.trials);
        REQUIRE(a.ci_low <= a.estimate);
        REQUIRE(a.estimate <= a.ci_high);
        REQUIRE(a.master_seed == 42);
        REQUIRE(a.scenario.n_cells == 8);
        REQUIRE(a.spec.variant == bcfar::DetectorVariant::Case2);
    }
}

TEST_CASE("known-interferer detector achieves its design rate", "[mc]") {
    // The excluded-cell structure makes the unconditional false-alarm rate
    // equal the design value exactly, so the Wilson interval should cover it.
    const auto spec = DetectorSpec::case1(1e-2, 8);
    bcfar::sim::Scenario sc;
    sc.n_cells = 16;
    sc.interferer = bcfar::sim::InterfererSpec{8, 20.0};

    const auto rep = oracle::mc_pfa(spec, sc, 100000, bcfar::derive_stream(7, 0));
    REQUIRE(rep.ci_low <= 1e-2);
    REQUIRE(1e-2 <= rep.ci_high);

    SECTION("estimates are clutter-rate invariant up to sampling noise") {
        bcfar::sim::Scenario lo = sc, hi = sc;
        lo.clutter_rate = 0.1;
        hi.clutter_rate = 10.0;
        const auto rl = oracle::mc_pfa(spec, lo, 100000, bcfar::derive_stream(7, 0));
        const auto rh = oracle::mc_pfa(spec, hi, 100000, bcfar::derive_stream(7, 0));
        const double se = std::sqrt(rl.estimate * (1.0 - rl.estimate) / rl.trials +
                                    rh.estimate * (1.0 - rh.estimate) / rh.trials);
        REQUIRE(std::abs(rl.estimate - rh.estimate) <= 4.0 * se);
    }
}
