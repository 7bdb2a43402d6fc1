#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "bcfar/detector.hpp"
#include "bcfar/log_sum.hpp"
#include "bcfar/quadrature.hpp"
#include "bcfar/rng.hpp"
#include "bcfar/scenario.hpp"

namespace bcfar::oracle {

/// Knobs for the quadrature cross-check path. `scale` is the integrand's
/// natural length scale (pass the window sum); it seeds the first tail
/// segment of the semi-infinite integrator.
struct QuadratureSettings {
    double rel_tol = 1e-10;
    std::size_t max_subdivisions = 10000;
    double scale = 1.0;
};

// ---------------------------------------------------------------------------
// Predictive densities of the cell under test given the window. Each is the
// negated tau-derivative of the matching false-alarm curve, so integrating a
// density from tau to infinity must reproduce the closed-form Pfa; that
// redundancy is what makes these usable as cross-checks. Mixture terms are
// evaluated in the log domain like the closed forms, but through the density
// formulas, not by reusing the Pfa evaluators.
// ---------------------------------------------------------------------------

/// Full-window cell-averaging density: N S^N (z0 + S)^{-(N+1)}.
inline double predictive_density_ca(double z0, const ClutterRangeProfile& crp) {
    detail::check_tau(z0);
    const double n = static_cast<double>(crp.size());
    const double s = crp.total();
    return std::exp(std::log(n) + n * std::log(s) - (n + 1.0) * std::log(z0 + s));
}

/// Known-interferer density: (N-1) S'^{N-1} (z0 + S')^{-N} with the
/// interferer cell excluded from the sum.
inline double predictive_density_case1(double z0, const ClutterRangeProfile& crp,
                                       std::size_t interferer_cell) {
    detail::check_tau(z0);
    if (interferer_cell < 1 || interferer_cell > crp.size()) {
        throw std::invalid_argument("predictive_density_case1: interferer cell out of range");
    }
    const double n = static_cast<double>(crp.size());
    const double s = crp.excluded_total(interferer_cell);
    return std::exp(std::log(n - 1.0) + (n - 1.0) * std::log(s) - n * std::log(z0 + s));
}

/// Unknown-location mixture density:
///   (N-1) [sum_j (pi_j/z_j)(z0 + S_j)^{-N}] / [sum_j (pi_j/z_j) S_j^{-(N-1)}].
inline double predictive_density_case2(double z0, const ClutterRangeProfile& crp,
                                       const InterferencePrior& prior) {
    detail::check_tau(z0);
    if (prior.has_absence_mass() || prior.n_cells() != crp.size()) {
        throw std::invalid_argument(
            "predictive_density_case2: prior must cover exactly the window cells");
    }
    const double n = static_cast<double>(crp.size());
    std::vector<double> num;
    std::vector<double> den;
    num.reserve(crp.size());
    den.reserve(crp.size());
    for (std::size_t j = 1; j <= crp.size(); ++j) {
        const double pi_j = prior.cell_weight(j);
        if (pi_j == 0.0) continue;
        const double log_weight = std::log(pi_j) - std::log(crp.cell(j));
        const double s_j = crp.excluded_total(j);
        num.push_back(log_weight - n * std::log(z0 + s_j));
        den.push_back(log_weight - (n - 1.0) * std::log(s_j));
    }
    return (n - 1.0) * std::exp(log_sum_exp(std::span<const double>(num)) -
                                log_sum_exp(std::span<const double>(den)));
}

/// Possibly-absent-interferer mixture density:
///   [pi_0 N(N-1)(z0+S)^{-(N+1)} + (N-1) sum_j (pi_j/z_j)(z0+S_j)^{-N}]
/// / [pi_0 (N-1) S^{-N}          +       sum_j (pi_j/z_j) S_j^{-(N-1)}].
inline double predictive_density_case3(double z0, const ClutterRangeProfile& crp,
                                       const InterferencePrior& prior) {
    detail::check_tau(z0);
    if (!prior.has_absence_mass() || prior.n_cells() != crp.size()) {
        throw std::invalid_argument(
            "predictive_density_case3: prior must carry an absence mass plus cell weights");
    }
    const double n = static_cast<double>(crp.size());
    std::vector<double> num;
    std::vector<double> den;
    num.reserve(crp.size() + 1);
    den.reserve(crp.size() + 1);
    const double pi_0 = prior.absence_weight();
    if (pi_0 > 0.0) {
        const double s = crp.total();
        num.push_back(std::log(pi_0) + std::log(n) + std::log(n - 1.0) -
                      (n + 1.0) * std::log(z0 + s));
        den.push_back(std::log(pi_0) + std::log(n - 1.0) - n * std::log(s));
    }
    for (std::size_t j = 1; j <= crp.size(); ++j) {
        const double pi_j = prior.cell_weight(j);
        if (pi_j == 0.0) continue;
        const double log_weight = std::log(pi_j) - std::log(crp.cell(j));
        const double s_j = crp.excluded_total(j);
        num.push_back(std::log(n - 1.0) + log_weight - n * std::log(z0 + s_j));
        den.push_back(log_weight - (n - 1.0) * std::log(s_j));
    }
    return std::exp(log_sum_exp(std::span<const double>(num)) -
                    log_sum_exp(std::span<const double>(den)));
}

/// Density matching whatever variant the spec names, as a reusable callable.
inline std::function<double(double)> predictive_density(const DetectorSpec& spec,
                                                        const ClutterRangeProfile& crp) {
    spec.validate(crp.size());
    switch (spec.variant) {
        case DetectorVariant::CaCfar:
            return [&crp](double z0) { return predictive_density_ca(z0, crp); };
        case DetectorVariant::Case1:
            return [&crp, cell = *spec.interferer_index](double z0) {
                return predictive_density_case1(z0, crp, cell);
            };
        case DetectorVariant::Case2:
            return [&crp, prior = *spec.prior](double z0) {
                return predictive_density_case2(z0, crp, prior);
            };
        case DetectorVariant::Case3:
            return [&crp, prior = *spec.prior](double z0) {
                return predictive_density_case3(z0, crp, prior);
            };
    }
    throw std::logic_error("predictive_density: unknown variant");
}

/// Integrate a predictive density from tau to infinity. This is the
/// quadrature-side estimate of Pfa(tau): an evaluation path with no code in
/// common with the closed-form ratios, used to cross-check them.
template <class DensityFn>
double quadrature_pfa(DensityFn&& density, double tau, const QuadratureSettings& settings = {}) {
    detail::check_tau(tau);
    auto result = integrate_to_infinity(density, tau, settings.scale, settings.rel_tol,
                                        settings.max_subdivisions);
    return result.value;
}

/// Convenience form: build the density for `spec` on `crp` and integrate it,
/// sizing the tail segments from the window sum.
inline double quadrature_pfa(double tau, const DetectorSpec& spec, const ClutterRangeProfile& crp,
                             QuadratureSettings settings = {}) {
    settings.scale = crp.total();
    return quadrature_pfa(predictive_density(spec, crp), tau, settings);
}

/// Empirical false-alarm estimate: run target-absent trials and count
/// declarations. The stream argument names the random source; its
/// (master_seed, stream_id) pair addresses the first trial chunk, so
/// repeated calls with an identically-constructed stream reproduce the
/// report bit for bit regardless of worker count.
inline sim::MonteCarloReport mc_pfa(const DetectorSpec& spec, const sim::Scenario& scenario,
                                    std::uint64_t trials, const RngStream& rng,
                                    unsigned n_threads = 1) {
    if (scenario.target_present) {
        throw std::invalid_argument(
            "mc_pfa: false-alarm estimation requires target_present = false");
    }
    sim::TrialRunOptions options;
    options.stream_id_base = rng.stream_id();
    options.n_threads = n_threads;
    return sim::run_trials(spec, scenario, trials, rng.master_seed(), options);
}

}  // namespace bcfar::oracle
