#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace bcfar {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t subdivisions = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 pair: Kronrod abscissae/weights (positive half, center
// last) and the embedded 7-point Gauss weights for abscissae 1, 3, 5, 7.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.99145537112081264, 0.94910791234275852, 0.86486442335976907, 0.74153118559939444,
    0.58608723546769113, 0.40584515137739717, 0.20778495500789847, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529225, 0.063092092629978553, 0.10479001032225018, 0.14065325971552592,
    0.16900472663926790,  0.19035057806478541,  0.20443294007529889, 0.20948214108472783};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.12948496616886969, 0.27970539148927667, 0.38183005050511894, 0.41795918367346939};

struct PanelEstimate {
    double integral;  // 15-point value
    double error;     // |15-point - 7-point|
};

template <class F>
PanelEstimate gauss_kronrod_panel(F&& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double k15 = kKronrodWeights[7] * f(center);
    double g7 = kGaussWeights[3] * f(center);
    for (std::size_t i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double pair_sum = f(center - dx) + f(center + dx);
        k15 += kKronrodWeights[i] * pair_sum;
        if (i % 2 == 1) {
            g7 += kGaussWeights[i / 2] * pair_sum;
        }
    }
    return PanelEstimate{half * k15, std::abs(half * (k15 - g7))};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over the finite interval [a, b].
/// Panels are bisected until each one's embedded error estimate drops below
/// rel_tol times its own integral (with a denormal-level absolute floor so
/// stretches where f vanishes terminate). Throws std::runtime_error if the
/// subdivision budget runs out before every panel converges.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-10,
                                    std::size_t max_subdivisions = 10000) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a <= b)) {
        throw std::invalid_argument("integrate_adaptive: need finite bounds with a <= b");
    }
    if (!(rel_tol > 0.0)) {
        throw std::invalid_argument("integrate_adaptive: rel_tol must be positive");
    }
    QuadratureResult result;
    if (a == b) return result;

    struct Interval {
        double lo, hi;
    };
    std::vector<Interval> stack{{a, b}};
    while (!stack.empty()) {
        const Interval iv = stack.back();
        stack.pop_back();
        const auto panel = detail::gauss_kronrod_panel(f, iv.lo, iv.hi);
        const bool converged = panel.error <= rel_tol * std::abs(panel.integral) ||
                               panel.error <= 1e-300;
        if (converged) {
            result.value += panel.integral;
            result.error_estimate += panel.error;
            continue;
        }
        if (result.subdivisions >= max_subdivisions) {
            throw std::runtime_error("integrate_adaptive: subdivision budget exhausted");
        }
        ++result.subdivisions;
        const double mid = 0.5 * (iv.lo + iv.hi);
        if (mid <= iv.lo || mid >= iv.hi) {
            throw std::runtime_error("integrate_adaptive: interval too small to split further");
        }
        stack.push_back({iv.lo, mid});
        stack.push_back({mid, iv.hi});
    }
    return result;
}

/// Adaptive integration of f over [a, infinity) for integrands with
/// power-law tails. Successively doubling segments are integrated with
/// integrate_adaptive; after each segment ending at T the remaining mass is
/// estimated by fitting f ~ C x^{-p} through f(T) and f(2T), giving
/// tail ~ f(T) T / (p - 1). Once that estimate is negligible against the
/// accumulated total it is added to the result and integration stops.
/// `scale` sets the first segment's length; pass the natural scale of f's
/// support. The subdivision budget is shared across all segments.
template <class F>
QuadratureResult integrate_to_infinity(F&& f, double a, double scale, double rel_tol = 1e-10,
                                       std::size_t max_subdivisions = 10000) {
    if (!std::isfinite(a)) {
        throw std::invalid_argument("integrate_to_infinity: lower bound must be finite");
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("integrate_to_infinity: scale must be positive and finite");
    }
    if (!(rel_tol > 0.0)) {
        throw std::invalid_argument("integrate_to_infinity: rel_tol must be positive");
    }

    QuadratureResult total;
    double lo = a;
    double seg_len = scale;
    for (int segment = 0; segment < 128; ++segment) {
        const double hi = lo + seg_len;
        auto piece = integrate_adaptive(f, lo, hi, rel_tol,
                                        max_subdivisions - total.subdivisions);
        total.value += piece.value;
        total.error_estimate += piece.error_estimate;
        total.subdivisions += piece.subdivisions;

        const double f_hi = f(hi);
        if (f_hi <= 0.0) return total;  // support exhausted
        const double f_2hi = f(2.0 * hi);
        if (f_2hi > 0.0 && f_2hi < f_hi) {
            const double p_hat = std::log(f_hi / f_2hi) / std::log(2.0);
            if (p_hat > 1.0) {
                const double tail = f_hi * hi / (p_hat - 1.0);
                if (tail <= 0.1 * rel_tol * std::abs(total.value)) {
                    total.value += tail;
                    return total;
                }
            }
        }
        lo = hi;
        seg_len *= 2.0;
    }
    throw std::runtime_error("integrate_to_infinity: tail did not converge");
}

}  // namespace bcfar
