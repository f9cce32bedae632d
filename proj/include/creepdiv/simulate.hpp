#pragma once

#include "creepdiv/levy_model.hpp"

#include <cstdint>
#include <vector>

namespace creepdiv {

struct SimConfig {
    double x0 = 1.0;
    double b = 0.0;
    long n_paths = 10000;
    double dt = 1e-3;
    double t_max = 0.0;  // 0 selects default_horizon(q)
    std::uint64_t seed = 20240601;
    bool bridge_correction = true;
    unsigned workers = 0;  // 0: hardware concurrency
    bool record_paths = false;

    /// ceil(18.5 / q): the first integer horizon with e^{-q t} < 1e-8.
    static double default_horizon(double q);
};

enum class PathClass { survived, creeping, brutal };

struct PathRecord {
    long path_id = 0;
    PathClass cls = PathClass::survived;
    double ruin_time = 0.0;             // NaN for survivors
    double discounted_dividends = 0.0;
    double discounted_creep = 0.0;      // e^{-q tau} on creeping, else 0
};

struct SimOutcome {
    double mean_value = 0.0;
    double std_err = 0.0;
    double creep_prob = 0.0;
    double brutal_prob = 0.0;
    double discounted_creep_mass = 0.0;  // mean of e^{-q tau} 1{creeping}
    double mean_dividends = 0.0;
    double mean_ruin_time = 0.0;         // over ruined paths; NaN if none
    long n_survived = 0;
    long n_creep = 0;
    long n_brutal = 0;
    long n_paths = 0;
    std::vector<PathRecord> paths;       // filled when record_paths is set
};

/// Throws InvalidConfig unless x0 >= 0, b >= 0, n_paths > 0, 0 < dt <= 1e-2
/// and e^{-q t_max} < 1e-8. Returns the config with t_max resolved.
SimConfig validate_sim_config(const LevyModel& m, SimConfig cfg);

/// Euler scheme for the refracted surplus with creeping and brutal ruin.
///
/// Each path owns two generators derived from (seed, path index): one drives
/// the Gaussian increments, the other the claim arrivals, phases and sizes.
/// Bridge uniforms are a hash of (seed, path, step). Paths run in parallel
/// but every statistic is reduced in path order, so the outcome depends on
/// the seed only.
SimOutcome simulate_batch(const LevyModel& m, const SimConfig& cfg);

/// Per-path payoff: discounted dividends + S * discounted creeping indicator.
std::vector<double> path_values(const LevyModel& m, const SimOutcome& outcome);

struct StrategyComparison {
    std::vector<double> thresholds;
    std::vector<SimOutcome> outcomes;
    std::vector<double> diff_mean;  // value(threshold) - value(reference), paired
    std::vector<double> diff_se;
    std::vector<bool> beats_reference;  // diff_mean > 3 diff_se
    std::size_t reference_index = 0;
    bool reference_dominant() const;
};

/// Runs every threshold on the same path seeds (common random numbers).
/// Throws InvalidConfig on an empty list or a bad reference index.
StrategyComparison compare_strategies(const LevyModel& m, double x0, const std::vector<double>& thresholds,
                                      SimConfig cfg, std::size_t reference_index);

}  // namespace creepdiv
