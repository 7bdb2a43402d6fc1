#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace bcfar {

namespace detail {

// Stafford variant 13 of the SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Gamma derivation in the SplitMix64 style: a strong 64-bit mix, forced odd,
// with low-entropy candidates (too few bit flips) salted.
inline std::uint64_t mix_gamma(std::uint64_t z) noexcept {
    z = (z ^ (z >> 33)) * 0xFF51AFD7ED558CCDULL;
    z = (z ^ (z >> 33)) * 0xC4CEB9FE1A85EC53ULL;
    z = (z ^ (z >> 33)) | 1ULL;
    int flips = 0;
    std::uint64_t d = z ^ (z >> 1);
    for (; d != 0; d &= d - 1) ++flips;
    if (flips < 24) z ^= 0xAAAAAAAAAAAAAAAAULL;
    return z;
}

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

}  // namespace detail

/// Deterministic SplitMix64-style stream addressed by (master_seed, stream_id).
///
/// Seed mixing: the initial state is mix64(master_seed + (2*stream_id + 1) *
/// golden) and the per-step increment is a stream-specific odd gamma derived
/// from mix64 of both seeds. The state advances by a fixed increment per draw
/// (state_n = state_0 + n * gamma), so the sequence depends only on
/// (master_seed, stream_id) and the draw count, never on scheduling. Distinct
/// stream ids select distinct increments, giving statistically independent
/// sequences.
class RngStream {
  public:
    RngStream() noexcept : RngStream(0, 0) {}

    RngStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
        : master_seed_(master_seed), stream_id_(stream_id) {
        state_ = detail::mix64(master_seed + (2 * stream_id + 1) * detail::kGoldenGamma);
        gamma_ = detail::mix_gamma(detail::mix64(master_seed) ^
                                   detail::mix64(stream_id + detail::kGoldenGamma));
    }

    [[nodiscard]] std::uint64_t master_seed() const noexcept { return master_seed_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t next_u64() noexcept {
        state_ += gamma_;
        return detail::mix64(state_);
    }

    /// Uniform draw on (0, 1]; the lower endpoint is excluded so log(u) is
    /// always finite.
    double next_uniform() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

  private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::uint64_t state_;
    std::uint64_t gamma_;
};

/// Stream for worker `stream_id` under a common master seed.
inline RngStream derive_stream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept {
    return RngStream(master_seed, stream_id);
}

/// Inverse-survival transform: -ln(u) / rate for u in (0, 1].
inline double exponential_from_uniform(double rate, double u) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw std::invalid_argument("exponential_from_uniform: rate must be positive and finite");
    }
    if (!(u > 0.0) || !(u <= 1.0)) {
        throw std::invalid_argument("exponential_from_uniform: u must lie in (0, 1]");
    }
    return -std::log(u) / rate;
}

/// One Exponential(rate) intensity sample, mean 1/rate.
inline double sample_exponential(double rate, RngStream& rng) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw std::invalid_argument("sample_exponential: rate must be positive and finite");
    }
    return -std::log(rng.next_uniform()) / rate;
}

}  // namespace bcfar
