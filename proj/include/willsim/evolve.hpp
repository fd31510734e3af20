#pragma once

#include <cstdint>
#include <vector>

#include "willsim/core.hpp"
#include "willsim/csv.hpp"
#include "willsim/rng.hpp"

namespace willsim::evolve {

/// Heterogeneous will strengths, one gene per agent. Genes are stored as
/// levels on the grid alpha = -1 + level * step so they never drift off it.
struct Genome {
    std::vector<int> levels;

    int size() const noexcept { return static_cast<int>(levels.size()); }
    bool operator==(const Genome&) const = default;
    auto operator<=>(const Genome&) const = default;
};

struct AlphaGrid {
    double step = 0.2;

    int levels() const noexcept;
    double alpha(int level) const noexcept;
    int level_of(double alpha) const noexcept;
};

double alpha_of(const Genome& g, int agent, const AlphaGrid& grid);
double mean_alpha(const Genome& g, const AlphaGrid& grid);
Genome uniform_genome(int n_agents, double alpha, const AlphaGrid& grid);

struct GAConfig {
    int pop_size = 32;
    int generations = 60;
    int episodes_per_eval = 30;
    int tournament_size = 3;
    double crossover_rate = 0.9;
    double mutation_rate = 0.05;
    int elitism = 2;
    AlphaGrid grid;
    int parallelism = 1;
};

void validate(const GAConfig& ga);

/// Mean normalized group payoff of Hybrid(alpha_i) agents over `episodes`
/// episodes seeded derive_episode_seed(eval_seed, e).
double evaluate_fitness(const Genome& genome, const SimConfig& config, int episodes, std::uint64_t eval_seed,
                        const AlphaGrid& grid = {});

struct GenerationRecord {
    int generation = 0;
    double best_fitness = 0.0;  // best seen so far
    double mean_fitness = 0.0;  // current population
};

struct EvolveResult {
    Genome best;
    double best_fitness = 0.0;
    std::vector<GenerationRecord> history;
    std::vector<Genome> final_population;
    std::vector<double> final_fitness;
    std::uint64_t eval_seed = 0;
};

/// Generational GA with tournament selection, uniform crossover, per-gene
/// resampling mutation and elitism. Every genome is scored on the same frozen
/// episode seeds, so fitness is a pure function of the genome. Randomness is
/// drawn from config.master_seed.
EvolveResult evolve(const GAConfig& ga, const SimConfig& config);

/// One generation of variation from a scored population (exposed for tests).
std::vector<Genome> next_generation(const std::vector<Genome>& population, const std::vector<double>& fitness,
                                    const GAConfig& ga, Rng& rng);

struct PayoffSplit {
    double max_alpha_payoff = 0.0;  // mean individual reward of the highest-alpha agents
    double min_alpha_payoff = 0.0;
    double group_payoff = 0.0;      // mean normalized group payoff
    double rational_baseline = 0.0; // same seeds, all alpha = 0
};

/// Individual-versus-group payoff comparison for an evolved genome.
PayoffSplit payoff_split(const Genome& genome, const SimConfig& config, int episodes, std::uint64_t seed,
                         const AlphaGrid& grid = {}, int parallelism = 1);

/// Columns: generation, best_fitness, mean_fitness.
CsvTable history_table(const EvolveResult& r);
/// Rows (theta, alpha_bin, population_share, mean_alpha) appended for one genome.
void append_distribution(CsvTable& table, int theta, const Genome& g, const AlphaGrid& grid);
CsvTable distribution_table_header();
CsvTable payoff_table_header();

}  // namespace willsim::evolve
