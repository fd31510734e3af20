#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "willsim/core.hpp"
#include "willsim/csv.hpp"

namespace willsim {

struct EpisodeResult {
    double total_reward = 0.0;
    std::vector<double> per_agent_rewards;
    double normalized_payoff = 0.0;
    int stags_captured = 0;
    int hares_captured = 0;
    std::vector<std::string> trace;  // JSON lines, filled only on request

    bool operator==(const EpisodeResult&) const = default;
};

/// Plays one episode. Deterministic in (config, specs, seed); the config's
/// master_seed is not consulted.
EpisodeResult run_episode(const SimConfig& config, std::span<const AgentSpec> specs, std::uint64_t seed,
                          bool record_trace = false);

struct BatchStats {
    int n_episodes = 0;
    double mean = 0.0;
    double sd = 0.0;
    double ci95_halfwidth = 0.0;
};

/// Mean, sample standard deviation and normal 95% half-width, summed in the
/// order given.
BatchStats summarize(std::span<const double> values);

/// Runs body(i) for i in [0, n) on up to `parallelism` threads.
void parallel_for(int n, int parallelism, const std::function<void(int)>& body);

/// Episode i uses seed derive_episode_seed(config.master_seed, i).
std::vector<EpisodeResult> run_batch_episodes(const SimConfig& config, std::span<const AgentSpec> specs,
                                              int n_episodes, int parallelism);

BatchStats run_batch(const SimConfig& config, std::span<const AgentSpec> specs, int n_episodes,
                     int parallelism);

struct Composition {
    int willed_stag = 0;
    int rational = 0;
    int willed_hare = 0;
};

std::vector<AgentSpec> composition_specs(const Composition& c);

// Every (stag, rational, hare) split of n agents with counts on a `step` grid.
std::vector<Composition> simplex_grid(int n_agents, int step);

struct SweepOptions {
    int episodes = 300;
    int parallelism = 1;
};

/// Columns: theta, n_willed_stag, n_rational, n_willed_hare, mean, ci95.
/// Each theta uses the willed-stag counts in `willed_counts`, the rest rational.
CsvTable sweep_composition(const SimConfig& base, std::span<const int> thetas,
                           std::span<const int> willed_counts, const SweepOptions& opt);

/// Same columns, over an explicit list of compositions.
CsvTable sweep_compositions(const SimConfig& base, std::span<const int> thetas,
                            std::span<const Composition> compositions, const SweepOptions& opt);

/// Columns: theta, alpha, mean, ci95 for homogeneous Hybrid(alpha) populations.
CsvTable sweep_strength(const SimConfig& base, std::span<const int> thetas, std::span<const double> alphas,
                        const SweepOptions& opt);

std::vector<double> alpha_grid(double step = 0.1);

struct StrategyCell {
    EndogenousStrategy strategy;
    std::string name;
};

/// PureRational, then Intermittent and Phased for each ratio, then Instant.
std::vector<StrategyCell> endogenous_strategies(std::span<const double> ratios, int horizon);

/// Columns: strategy, k, rs_bar, mean, ci95.
CsvTable run_endogenous(const SimConfig& base, std::span<const double> rs_bars, std::span<const double> ratios,
                        const SweepOptions& opt);

}  // namespace willsim
