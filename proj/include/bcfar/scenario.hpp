#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "bcfar/detector.hpp"
#include "bcfar/rng.hpp"

namespace bcfar::sim {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// One interfering target inside the reference window: which cell it
/// occupies (1-based) and its interference-to-clutter power ratio in dB.
struct InterfererSpec {
    std::size_t cell_index = 1;
    double icr_db = 0.0;
};

/// Physical situation for one simulated trial. Clutter cells are
/// exponential with rate `clutter_rate`; a cell hosting a target (the
/// interferer in the window, or the cell under test when target_present)
/// keeps exponential shape but its mean is scaled by 1 + power ratio.
struct Scenario {
    std::size_t n_cells = 16;
    double clutter_rate = 1.0;
    bool target_present = false;
    double scr_db = 0.0;  // signal-to-clutter ratio of the sought target, used when present
    std::optional<InterfererSpec> interferer;

    void validate() const {
        if (n_cells < 2) {
            throw std::invalid_argument("Scenario: need at least 2 reference cells");
        }
        if (!(clutter_rate > 0.0) || !std::isfinite(clutter_rate)) {
            throw std::invalid_argument("Scenario: clutter_rate must be positive and finite");
        }
        if (!std::isfinite(scr_db)) {
            throw std::invalid_argument("Scenario: scr_db must be finite");
        }
        if (interferer) {
            if (interferer->cell_index < 1 || interferer->cell_index > n_cells) {
                throw std::invalid_argument("Scenario: interferer cell index out of range");
            }
            if (!std::isfinite(interferer->icr_db)) {
                throw std::invalid_argument("Scenario: icr_db must be finite");
            }
        }
    }
};

/// One draw from a scenario: the cell under test plus the reference window.
struct TrialDraw {
    double cut;
    ClutterRangeProfile crp;
};

/// Draw one trial. Consumes exactly n_cells + 1 uniforms in a fixed order
/// (cell under test first, then cells 1..N), so trial streams stay aligned
/// across detector variants and hypotheses.
inline TrialDraw generate_trial(const Scenario& sc, RngStream& rng) {
    sc.validate();
    const double cut_rate =
        sc.target_present ? sc.clutter_rate / (1.0 + db_to_linear(sc.scr_db)) : sc.clutter_rate;
    const double cut = sample_exponential(cut_rate, rng);
    std::vector<double> cells(sc.n_cells);
    for (std::size_t j = 1; j <= sc.n_cells; ++j) {
        double rate = sc.clutter_rate;
        if (sc.interferer && sc.interferer->cell_index == j) {
            rate = sc.clutter_rate / (1.0 + db_to_linear(sc.interferer->icr_db));
        }
        cells[j - 1] = sample_exponential(rate, rng);
    }
    return TrialDraw{cut, ClutterRangeProfile(std::move(cells))};
}

/// z for a two-sided 99% Wilson score interval.
inline constexpr double kWilsonZ99 = 2.575829303548901;

/// Wilson score interval for a binomial proportion; never leaves [0, 1] and
/// stays informative when successes is 0 or n.
inline std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t n,
                                                 double z = kWilsonZ99) {
    if (n == 0) {
        throw std::invalid_argument("wilson_interval: need at least one trial");
    }
    if (successes > n) {
        throw std::invalid_argument("wilson_interval: successes exceed trials");
    }
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw std::invalid_argument("wilson_interval: z must be positive and finite");
    }
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = (z / denom) * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

/// Result of a batch of Monte-Carlo trials against one scenario: declaration
/// count, point estimate, a 99% Wilson interval around it, and an echo of
/// the inputs that produced it so a report is self-describing.
struct MonteCarloReport {
    std::uint64_t trials = 0;
    std::uint64_t declared = 0;
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t master_seed = 0;
    Scenario scenario;
    DetectorSpec spec;
};

struct TrialRunOptions {
    /// First stream id used by this batch; chunk c draws from stream
    /// stream_id_base + c. Callers running several batches under one master
    /// seed space the bases apart to keep the streams disjoint.
    std::uint64_t stream_id_base = 0;
    unsigned n_threads = 1;
};

namespace detail {

/// Trials per RNG stream. Chunking fixes the mapping trial -> (stream,
/// position) regardless of how chunks are distributed over workers.
inline constexpr std::uint64_t kChunkTrials = 65536;

inline std::uint64_t run_chunk(const DetectorSpec& spec, const Scenario& sc, RngStream rng,
                               std::uint64_t n_trials) {
    std::uint64_t declared = 0;
    for (std::uint64_t t = 0; t < n_trials; ++t) {
        const TrialDraw draw = generate_trial(sc, rng);
        if (bcfar::detail::dispatch_pfa(draw.cut, spec, draw.crp) < spec.design_pfa) {
            ++declared;
        }
    }
    return declared;
}

}  // namespace detail

/// Run `trials` independent trials of a detector against a scenario.
///
/// Trials are split into fixed-size chunks, each driven by its own
/// counter-derived RNG stream, and per-chunk declaration counts are integers
/// summed over chunks. Both the draw sequence and the reduction are
/// therefore independent of thread count: the same (master_seed,
/// stream_id_base, trials) triple yields bit-identical reports whether run
/// on 1 thread or 16.
inline MonteCarloReport run_trials(const DetectorSpec& spec, const Scenario& sc,
                                   std::uint64_t trials, std::uint64_t master_seed,
                                   const TrialRunOptions& options = {}) {
    sc.validate();
    spec.validate(sc.n_cells);
    if (trials == 0) {
        throw std::invalid_argument("run_trials: need at least one trial");
    }
    if (options.n_threads == 0) {
        throw std::invalid_argument("run_trials: need at least one thread");
    }

    const std::uint64_t n_chunks = (trials + detail::kChunkTrials - 1) / detail::kChunkTrials;
    const auto chunk_count = [&](std::uint64_t c) {
        const std::uint64_t begin = c * detail::kChunkTrials;
        const std::uint64_t len = std::min(detail::kChunkTrials, trials - begin);
        return detail::run_chunk(spec, sc, derive_stream(master_seed, options.stream_id_base + c),
                                 len);
    };

    std::uint64_t declared = 0;
    const unsigned n_threads =
        static_cast<unsigned>(std::min<std::uint64_t>(options.n_threads, n_chunks));
    if (n_threads <= 1) {
        for (std::uint64_t c = 0; c < n_chunks; ++c) declared += chunk_count(c);
    } else {
        std::vector<std::uint64_t> partial(n_threads, 0);
        std::vector<std::thread> workers;
        workers.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) {
            workers.emplace_back([&, t] {
                std::uint64_t local = 0;
                for (std::uint64_t c = t; c < n_chunks; c += n_threads) local += chunk_count(c);
                partial[t] = local;
            });
        }
        for (auto& w : workers) w.join();
        for (std::uint64_t p : partial) declared += p;
    }

    MonteCarloReport report;
    report.trials = trials;
    report.declared = declared;
    report.estimate = static_cast<double>(declared) / static_cast<double>(trials);
    std::tie(report.ci_low, report.ci_high) = wilson_interval(declared, trials);
    report.master_seed = master_seed;
    report.scenario = sc;
    report.spec = spec;
    return report;
}

}  // namespace bcfar::sim
