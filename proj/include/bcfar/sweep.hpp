#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bcfar/detector.hpp"
#include "bcfar/oracle.hpp"
#include "bcfar/rng.hpp"
#include "bcfar/scenario.hpp"

namespace bcfar::sim {

struct SweepOptions {
    unsigned n_threads = 1;
};

namespace detail {

/// Grid point g owns stream ids [g * 2^32, (g+1) * 2^32): disjoint stream
/// ranges per point, with room for 2^32 trial chunks inside each.
inline std::uint64_t grid_stream_base(std::size_t grid_index) {
    return static_cast<std::uint64_t>(grid_index) << 32;
}

}  // namespace detail

/// False-alarm certification sweep: one target-absent Monte-Carlo batch per
/// scenario (typically a grid over clutter rate and interferer settings).
/// Reports come back in grid order; an empty grid yields an empty list.
/// Deterministic for fixed (spec, grid, trials, master_seed) regardless of
/// worker count.
inline std::vector<MonteCarloReport> run_pfa_sweep(const DetectorSpec& spec,
                                                   const std::vector<Scenario>& grid,
                                                   std::uint64_t trials,
                                                   std::uint64_t master_seed,
                                                   const SweepOptions& options = {}) {
    std::vector<MonteCarloReport> reports;
    reports.reserve(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        reports.push_back(oracle::mc_pfa(spec, grid[g], trials,
                                         derive_stream(master_seed, detail::grid_stream_base(g)),
                                         options.n_threads));
    }
    return reports;
}

/// Detection-probability curve: one target-present batch per SCR grid point,
/// holding everything else in the base scenario fixed. The grid must be
/// nonempty and the base scenario must have target_present = true.
inline std::vector<MonteCarloReport> run_pd_curve(const DetectorSpec& spec,
                                                  const Scenario& base_scenario,
                                                  const std::vector<double>& scr_grid_db,
                                                  std::uint64_t trials, std::uint64_t master_seed,
                                                  const SweepOptions& options = {}) {
    if (scr_grid_db.empty()) {
        throw std::invalid_argument("run_pd_curve: SCR grid must be nonempty");
    }
    if (!base_scenario.target_present) {
        throw std::invalid_argument("run_pd_curve: base scenario must have target_present = true");
    }
    std::vector<MonteCarloReport> reports;
    reports.reserve(scr_grid_db.size());
    for (std::size_t g = 0; g < scr_grid_db.size(); ++g) {
        Scenario point = base_scenario;
        point.scr_db = scr_grid_db[g];
        TrialRunOptions run_options;
        run_options.stream_id_base = detail::grid_stream_base(g);
        run_options.n_threads = options.n_threads;
        reports.push_back(run_trials(spec, point, trials, master_seed, run_options));
    }
    return reports;
}

}  // namespace bcfar::sim
