#pragma once

#include <cmath>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>

namespace bcfar {

/// One strictly positive mixture summand carried on the natural-log scale.
/// The mixtures evaluated in this library have no negative terms, so there is
/// no signed log arithmetic: a nonpositive magnitude is an error, never a
/// sign to track.
struct LogWeightedTerm {
    double log_magnitude;

    static LogWeightedTerm from_log(double log_value) noexcept { return {log_value}; }

    static LogWeightedTerm from_positive(double value) {
        if (!(value > 0.0)) {
            throw std::domain_error("LogWeightedTerm: magnitude must be strictly positive");
        }
        return {std::log(value)};
    }
};

/// ln(sum_i exp(terms[i])), stable for magnitudes up to ~1e4 either way.
/// Entries may be -infinity (zero summands); an empty list is a usage error.
inline double log_sum_exp(std::span<const double> terms) {
    if (terms.empty()) {
        throw std::invalid_argument("log_sum_exp: empty term list");
    }
    double max_term = -std::numeric_limits<double>::infinity();
    for (double t : terms) {
        if (t > max_term) max_term = t;
    }
    if (!std::isfinite(max_term)) {
        return max_term;  // all terms -inf (sum is zero), or a propagated inf
    }
    double acc = 0.0;
    for (double t : terms) {
        acc += std::exp(t - max_term);
    }
    return max_term + std::log(acc);
}

inline double log_sum_exp(std::initializer_list<double> terms) {
    return log_sum_exp(std::span<const double>(terms.begin(), terms.size()));
}

inline double log_sum_exp(std::span<const LogWeightedTerm> terms) {
    if (terms.empty()) {
        throw std::invalid_argument("log_sum_exp: empty term list");
    }
    double max_term = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms) {
        if (t.log_magnitude > max_term) max_term = t.log_magnitude;
    }
    if (!std::isfinite(max_term)) {
        return max_term;
    }
    double acc = 0.0;
    for (const auto& t : terms) {
        acc += std::exp(t.log_magnitude - max_term);
    }
    return max_term + std::log(acc);
}

}  // namespace bcfar
