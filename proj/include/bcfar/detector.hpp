#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bcfar/log_sum.hpp"

namespace bcfar {

namespace detail {

// Neumaier compensated summation; keeps cell totals accurate for long
// profiles so excluded sums S - z_j stay trustworthy.
inline double compensated_sum(std::span<const double> xs) noexcept {
    double sum = 0.0;
    double comp = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

inline void check_tau(double tau) {
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
        throw std::invalid_argument("threshold multiplier must be nonnegative and finite");
    }
}

inline void check_alpha(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw std::invalid_argument("design Pfa must lie strictly inside (0, 1)");
    }
}

}  // namespace detail

/// The N reference intensities surrounding the cell under test, in range
/// order. Immutable once built; the total is precomputed so every excluded
/// sum is an O(1) subtraction. Cells are addressed 1-based throughout the
/// public API.
///
/// Requires N >= 2 and every cell finite and strictly positive (the
/// interference-compensating statistics divide by individual cells, and a
/// continuous clutter model produces a zero cell with probability zero, so a
/// zero here means the input is bad rather than unlucky).
class ClutterRangeProfile {
  public:
    explicit ClutterRangeProfile(std::vector<double> cells) : cells_(std::move(cells)) {
        if (cells_.size() < 2) {
            throw std::invalid_argument("ClutterRangeProfile: need at least 2 cells");
        }
        for (double z : cells_) {
            if (!std::isfinite(z) || !(z > 0.0)) {
                throw std::domain_error(
                    "ClutterRangeProfile: cells must be finite and strictly positive");
            }
        }
        total_ = detail::compensated_sum(cells_);
    }

    [[nodiscard]] std::size_t size() const noexcept { return cells_.size(); }
    [[nodiscard]] const std::vector<double>& cells() const noexcept { return cells_; }

    /// Cell j, 1-based.
    [[nodiscard]] double cell(std::size_t j) const {
        if (j < 1 || j > cells_.size()) {
            throw std::out_of_range("ClutterRangeProfile: cell index out of range");
        }
        return cells_[j - 1];
    }

    /// Sum of all cells.
    [[nodiscard]] double total() const noexcept { return total_; }

    /// Sum of all cells except cell j (1-based).
    [[nodiscard]] double excluded_total(std::size_t j) const { return total_ - cell(j); }

  private:
    std::vector<double> cells_;
    double total_ = 0.0;
};

/// Prior probabilities over where the interfering target sits. Without an
/// absence mass the vector is [pi_1..pi_N] (one cell definitely contains the
/// interferer); with it the vector is [pi_0, pi_1..pi_N] where pi_0 is the
/// probability of no interference at all.
///
/// Weights must be nonnegative and sum to one within 1e-9. A prior that
/// fails the sum check is rejected outright, not renormalized: a malformed
/// prior is a configuration bug.
class InterferencePrior {
  public:
    static constexpr double kSumTolerance = 1e-9;

    InterferencePrior(bool with_absence, std::vector<double> weights)
        : with_absence_(with_absence), weights_(std::move(weights)) {
        const std::size_t min_size = with_absence_ ? 3 : 2;
        if (weights_.size() < min_size) {
            throw std::invalid_argument("InterferencePrior: too few weights");
        }
        double sum = 0.0;
        for (double w : weights_) {
            if (!std::isfinite(w) || w < 0.0) {
                throw std::invalid_argument(
                    "InterferencePrior: weights must be finite and nonnegative");
            }
            sum += w;
        }
        if (std::abs(sum - 1.0) > kSumTolerance) {
            throw std::invalid_argument("InterferencePrior: weights must sum to 1 (got " +
                                        std::to_string(sum) + ")");
        }
    }

    /// Equal mass on every cell, no absence mass.
    static InterferencePrior uniform(std::size_t n_cells) {
        return InterferencePrior(false,
                                 std::vector<double>(n_cells, 1.0 / static_cast<double>(n_cells)));
    }

    /// All mass on one cell (1-based), no absence mass.
    static InterferencePrior point_mass(std::size_t cell_index, std::size_t n_cells) {
        if (cell_index < 1 || cell_index > n_cells) {
            throw std::invalid_argument("InterferencePrior: point-mass cell index out of range");
        }
        std::vector<double> w(n_cells, 0.0);
        w[cell_index - 1] = 1.0;
        return InterferencePrior(false, std::move(w));
    }

    /// Absence mass p0, remaining 1 - p0 spread evenly over the cells.
    static InterferencePrior absent_uniform(double p0, std::size_t n_cells) {
        if (!(p0 >= 0.0) || !(p0 <= 1.0)) {
            throw std::invalid_argument("InterferencePrior: absence mass must lie in [0, 1]");
        }
        std::vector<double> w(n_cells + 1, (1.0 - p0) / static_cast<double>(n_cells));
        w[0] = p0;
        return InterferencePrior(true, std::move(w));
    }

    /// Absence mass p0 in front of explicit per-cell weights.
    static InterferencePrior with_absence_mass(double p0, std::vector<double> cell_weights) {
        std::vector<double> w;
        w.reserve(cell_weights.size() + 1);
        w.push_back(p0);
        w.insert(w.end(), cell_weights.begin(), cell_weights.end());
        return InterferencePrior(true, std::move(w));
    }

    /// Convenience prior for a split sliding window read in range order:
    /// cells adjacent to the guard cells (the middle of the list) carry the
    /// most mass, decaying geometrically by `decay` per cell toward the ends.
    /// decay = 1 reduces to the uniform prior.
    static InterferencePrior geometric(std::size_t n_cells, double decay) {
        if (!(decay > 0.0) || !(decay <= 1.0)) {
            throw std::invalid_argument("InterferencePrior: decay must lie in (0, 1]");
        }
        if (n_cells < 2) {
            throw std::invalid_argument("InterferencePrior: need at least 2 cells");
        }
        const std::size_t half = n_cells / 2;
        std::vector<double> w(n_cells);
        double sum = 0.0;
        for (std::size_t j = 1; j <= n_cells; ++j) {
            const std::size_t dist = (j <= half) ? half - j : j - half - 1;
            w[j - 1] = std::pow(decay, static_cast<double>(dist));
            sum += w[j - 1];
        }
        for (double& x : w) x /= sum;
        return InterferencePrior(false, std::move(w));
    }

    [[nodiscard]] bool has_absence_mass() const noexcept { return with_absence_; }

    [[nodiscard]] std::size_t n_cells() const noexcept {
        return with_absence_ ? weights_.size() - 1 : weights_.size();
    }

    /// pi_0; zero when the prior has no absence hypothesis.
    [[nodiscard]] double absence_weight() const noexcept {
        return with_absence_ ? weights_[0] : 0.0;
    }

    /// pi_j for cell j (1-based).
    [[nodiscard]] double cell_weight(std::size_t j) const {
        if (j < 1 || j > n_cells()) {
            throw std::out_of_range("InterferencePrior: cell index out of range");
        }
        return weights_[with_absence_ ? j : j - 1];
    }

    [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }

  private:
    bool with_absence_;
    std::vector<double> weights_;
};

enum class DetectorVariant { CaCfar, Case1, Case2, Case3 };

inline const char* variant_name(DetectorVariant v) noexcept {
    switch (v) {
        case DetectorVariant::CaCfar: return "ca-cfar";
        case DetectorVariant::Case1: return "case1";
        case DetectorVariant::Case2: return "case2";
        case DetectorVariant::Case3: return "case3";
    }
    return "?";
}

/// Detector variant plus design false-alarm rate and the variant's
/// structural parameters: Case1 carries the known interferer cell, Case2/3
/// carry a location prior.
struct DetectorSpec {
    DetectorVariant variant = DetectorVariant::CaCfar;
    double design_pfa = 1e-2;
    std::optional<std::size_t> interferer_index;  // 1-based, Case1 only
    std::optional<InterferencePrior> prior;       // Case2/Case3 only

    static DetectorSpec ca_cfar(double alpha) {
        return DetectorSpec{DetectorVariant::CaCfar, alpha, std::nullopt, std::nullopt};
    }
    static DetectorSpec case1(double alpha, std::size_t interferer_cell) {
        return DetectorSpec{DetectorVariant::Case1, alpha, interferer_cell, std::nullopt};
    }
    static DetectorSpec case2(double alpha, InterferencePrior prior) {
        return DetectorSpec{DetectorVariant::Case2, alpha, std::nullopt, std::move(prior)};
    }
    static DetectorSpec case3(double alpha, InterferencePrior prior) {
        return DetectorSpec{DetectorVariant::Case3, alpha, std::nullopt, std::move(prior)};
    }

    /// Check internal consistency against a window of n_cells reference
    /// cells. Throws std::invalid_argument on any mismatch.
    void validate(std::size_t n_cells) const {
        if (!(design_pfa > 0.0) || !(design_pfa < 1.0)) {
            throw std::invalid_argument("DetectorSpec: design_pfa must lie in (0, 1)");
        }
        switch (variant) {
            case DetectorVariant::CaCfar:
                if (interferer_index || prior) {
                    throw std::invalid_argument("DetectorSpec: ca-cfar takes no interferer fields");
                }
                break;
            case DetectorVariant::Case1:
                if (!interferer_index) {
                    throw std::invalid_argument("DetectorSpec: case1 requires interferer_index");
                }
                if (*interferer_index < 1 || *interferer_index > n_cells) {
                    throw std::invalid_argument("DetectorSpec: interferer_index out of range");
                }
                if (prior) {
                    throw std::invalid_argument("DetectorSpec: case1 takes no prior");
                }
                break;
            case DetectorVariant::Case2:
                if (!prior || prior->has_absence_mass()) {
                    throw std::invalid_argument(
                        "DetectorSpec: case2 requires a prior without absence mass");
                }
                if (prior->n_cells() != n_cells) {
                    throw std::invalid_argument("DetectorSpec: prior length must match window");
                }
                if (interferer_index) {
                    throw std::invalid_argument("DetectorSpec: case2 takes no interferer_index");
                }
                break;
            case DetectorVariant::Case3:
                if (!prior || !prior->has_absence_mass()) {
                    throw std::invalid_argument(
                        "DetectorSpec: case3 requires a prior with absence mass");
                }
                if (prior->n_cells() != n_cells) {
                    throw std::invalid_argument("DetectorSpec: prior length must match window");
                }
                if (interferer_index) {
                    throw std::invalid_argument("DetectorSpec: case3 takes no interferer_index");
                }
                break;
        }
    }
};

/// Outcome of testing one cell under test: the predictive false-alarm
/// probability evaluated at the cell's intensity, the declaration, and (for
/// the variants with a closed-form inverse) the equivalent threshold.
struct Decision {
    bool target_declared = false;
    double pfa_at_cut = 1.0;
    std::optional<double> threshold;
};

// ---------------------------------------------------------------------------
// False-alarm probability evaluators
//
// All mixture sums run through log_sum_exp on terms of the form
// ln pi_j - ln z_j - (N-1) ln(tau + S_j); in linear space the (N-1)-th powers
// underflow once N reaches a few dozen. Terms with pi_j = 0 are skipped.
// ---------------------------------------------------------------------------

/// Cell-averaging baseline: [S / (tau + S)]^N with S the full-window sum.
inline double ca_cfar_pfa(double tau, const ClutterRangeProfile& crp) {
    detail::check_tau(tau);
    const double n = static_cast<double>(crp.size());
    const double s = crp.total();
    return std::exp(-n * (std::log(tau + s) - std::log(s)));
}

/// Exact inverse of ca_cfar_pfa: tau = S (alpha^{-1/N} - 1).
inline double ca_cfar_threshold(double alpha, const ClutterRangeProfile& crp) {
    detail::check_alpha(alpha);
    const double n = static_cast<double>(crp.size());
    return crp.total() * std::expm1(-std::log(alpha) / n);
}

/// Known interferer location: cell-averaging over the window with cell
/// `interferer_cell` excluded, [S' / (tau + S')]^{N-1}.
inline double case1_pfa(double tau, const ClutterRangeProfile& crp, std::size_t interferer_cell) {
    detail::check_tau(tau);
    if (interferer_cell < 1 || interferer_cell > crp.size()) {
        throw std::invalid_argument("case1_pfa: interferer cell index out of range");
    }
    const double n = static_cast<double>(crp.size());
    const double s = crp.excluded_total(interferer_cell);
    return std::exp(-(n - 1.0) * (std::log(tau + s) - std::log(s)));
}

/// Exact inverse of case1_pfa: tau = S' (alpha^{-1/(N-1)} - 1).
inline double case1_threshold(double alpha, const ClutterRangeProfile& crp,
                              std::size_t interferer_cell) {
    detail::check_alpha(alpha);
    if (interferer_cell < 1 || interferer_cell > crp.size()) {
        throw std::invalid_argument("case1_threshold: interferer cell index out of range");
    }
    const double n = static_cast<double>(crp.size());
    return crp.excluded_total(interferer_cell) * std::expm1(-std::log(alpha) / (n - 1.0));
}

/// Unknown interferer location with prior pi over the cells:
///
///   Pfa(tau) = sum_j (pi_j/z_j) (tau + S_j)^{-(N-1)}
///            / sum_j (pi_j/z_j) (S_j)^{-(N-1)},   S_j = sum_{i != j} z_i.
inline double case2_pfa(double tau, const ClutterRangeProfile& crp,
                        const InterferencePrior& prior) {
    detail::check_tau(tau);
    if (prior.has_absence_mass() || prior.n_cells() != crp.size()) {
        throw std::invalid_argument("case2_pfa: prior must cover exactly the window cells");
    }
    const double power = static_cast<double>(crp.size()) - 1.0;
    std::vector<LogWeightedTerm> num;
    std::vector<LogWeightedTerm> den;
    num.reserve(crp.size());
    den.reserve(crp.size());
    for (std::size_t j = 1; j <= crp.size(); ++j) {
        const double pi_j = prior.cell_weight(j);
        if (pi_j == 0.0) continue;
        const double log_weight = std::log(pi_j) - std::log(crp.cell(j));
        const double s_j = crp.excluded_total(j);
        num.push_back(LogWeightedTerm::from_log(log_weight - power * std::log(tau + s_j)));
        den.push_back(LogWeightedTerm::from_log(log_weight - power * std::log(s_j)));
    }
    return std::exp(log_sum_exp(std::span<const LogWeightedTerm>(num)) -
                    log_sum_exp(std::span<const LogWeightedTerm>(den)));
}

/// Possibly-absent interferer: prior [pi_0, pi_1..pi_N] where pi_0 is the
/// no-interference mass. The pi_0 hypothesis contributes the full-window
/// cell-averaging term:
///
///   Pfa(tau) = [pi_0 (N-1) (tau + S)^{-N} + sum_j (pi_j/z_j) (tau + S_j)^{-(N-1)}]
///            / [pi_0 (N-1) S^{-N}        + sum_j (pi_j/z_j) S_j^{-(N-1)}].
inline double case3_pfa(double tau, const ClutterRangeProfile& crp,
                        const InterferencePrior& prior) {
    detail::check_tau(tau);
    if (!prior.has_absence_mass() || prior.n_cells() != crp.size()) {
        throw std::invalid_argument(
            "case3_pfa: prior must carry an absence mass plus one weight per cell");
    }
    const double n = static_cast<double>(crp.size());
    const double power = n - 1.0;
    std::vector<LogWeightedTerm> num;
    std::vector<LogWeightedTerm> den;
    num.reserve(crp.size() + 1);
    den.reserve(crp.size() + 1);
    const double pi_0 = prior.absence_weight();
    if (pi_0 > 0.0) {
        const double log_weight = std::log(pi_0) + std::log(n - 1.0);
        const double s = crp.total();
        num.push_back(LogWeightedTerm::from_log(log_weight - n * std::log(tau + s)));
        den.push_back(LogWeightedTerm::from_log(log_weight - n * std::log(s)));
    }
    for (std::size_t j = 1; j <= crp.size(); ++j) {
        const double pi_j = prior.cell_weight(j);
        if (pi_j == 0.0) continue;
        const double log_weight = std::log(pi_j) - std::log(crp.cell(j));
        const double s_j = crp.excluded_total(j);
        num.push_back(LogWeightedTerm::from_log(log_weight - power * std::log(tau + s_j)));
        den.push_back(LogWeightedTerm::from_log(log_weight - power * std::log(s_j)));
    }
    return std::exp(log_sum_exp(std::span<const LogWeightedTerm>(num)) -
                    log_sum_exp(std::span<const LogWeightedTerm>(den)));
}

/// Numerical inverse for the variants without a closed-form threshold.
/// `pfa` must be strictly decreasing with pfa(0) = 1 and limit 0; the result
/// tau* satisfies |pfa(tau*) - alpha| <= 1e-10 * alpha. Bracket expansion
/// doubles the upper bound from `scale_hint` (pass the window sum when
/// available); failing to bracket within 64 doublings is a numerical error.
template <class PfaFn>
double bayes_threshold(double alpha, PfaFn&& pfa, double scale_hint = 1.0) {
    detail::check_alpha(alpha);
    if (!(scale_hint > 0.0) || !std::isfinite(scale_hint)) {
        throw std::invalid_argument("bayes_threshold: scale_hint must be positive and finite");
    }
    const double rel_tol = 1e-10;
    double lo = 0.0;
    double hi = scale_hint;
    for (int doublings = 0; pfa(hi) >= alpha; ++doublings) {
        if (doublings >= 64 || !std::isfinite(hi)) {
            throw std::runtime_error("bayes_threshold: bracket expansion failed");
        }
        lo = hi;
        hi *= 2.0;
    }
    for (int iter = 0; iter < 400; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval exhausted at double precision
        const double p = pfa(mid);
        if (std::abs(p - alpha) <= rel_tol * alpha) return mid;
        if (p > alpha) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    throw std::runtime_error("bayes_threshold: bisection did not reach tolerance");
}

namespace detail {

inline double dispatch_pfa(double tau, const DetectorSpec& spec, const ClutterRangeProfile& crp) {
    switch (spec.variant) {
        case DetectorVariant::CaCfar: return ca_cfar_pfa(tau, crp);
        case DetectorVariant::Case1: return case1_pfa(tau, crp, *spec.interferer_index);
        case DetectorVariant::Case2: return case2_pfa(tau, crp, *spec.prior);
        case DetectorVariant::Case3: return case3_pfa(tau, crp, *spec.prior);
    }
    throw std::logic_error("dispatch_pfa: unknown variant");
}

}  // namespace detail

/// Pfa(tau) for whichever variant the spec names.
inline double detector_pfa(double tau, const DetectorSpec& spec, const ClutterRangeProfile& crp) {
    spec.validate(crp.size());
    return detail::dispatch_pfa(tau, spec, crp);
}

/// Threshold achieving the requested design Pfa on this window: closed form
/// for ca-cfar/case1, bisection for case2/case3.
inline double detector_threshold(const DetectorSpec& spec, const ClutterRangeProfile& crp) {
    spec.validate(crp.size());
    switch (spec.variant) {
        case DetectorVariant::CaCfar: return ca_cfar_threshold(spec.design_pfa, crp);
        case DetectorVariant::Case1:
            return case1_threshold(spec.design_pfa, crp, *spec.interferer_index);
        case DetectorVariant::Case2:
            return bayes_threshold(
                spec.design_pfa, [&](double t) { return case2_pfa(t, crp, *spec.prior); },
                crp.total());
        case DetectorVariant::Case3:
            return bayes_threshold(
                spec.design_pfa, [&](double t) { return case3_pfa(t, crp, *spec.prior); },
                crp.total());
    }
    throw std::logic_error("detector_threshold: unknown variant");
}

/// Test one cell under test against the window: reject the no-target
/// hypothesis iff Pfa(z0) falls strictly below the design Pfa. A tie is no
/// detection. For ca-cfar/case1 the equivalent closed-form threshold is
/// reported alongside.
inline Decision decide(double z0, const DetectorSpec& spec, const ClutterRangeProfile& crp) {
    spec.validate(crp.size());
    if (!(z0 >= 0.0) || !std::isfinite(z0)) {
        throw std::invalid_argument("decide: cell under test must be nonnegative and finite");
    }
    Decision d;
    d.pfa_at_cut = detail::dispatch_pfa(z0, spec, crp);
    d.target_declared = d.pfa_at_cut < spec.design_pfa;
    if (spec.variant == DetectorVariant::CaCfar) {
        d.threshold = ca_cfar_threshold(spec.design_pfa, crp);
    } else if (spec.variant == DetectorVariant::Case1) {
        d.threshold = case1_threshold(spec.design_pfa, crp, *spec.interferer_index);
    }
    return d;
}

}  // namespace bcfar
