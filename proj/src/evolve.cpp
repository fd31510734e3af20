#include "willsim/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "willsim/harness.hpp"

namespace willsim::evolve {

int AlphaGrid::levels() const noexcept { return static_cast<int>(std::lround(2.0 / step)) + 1; }

double AlphaGrid::alpha(int level) const noexcept {
    const double a = -1.0 + 2.0 * level / (levels() - 1);
    return std::round(a * 1e10) / 1e10;
}

int AlphaGrid::level_of(double alpha) const noexcept {
    return std::clamp(static_cast<int>(std::lround((alpha + 1.0) / 2.0 * (levels() - 1))), 0, levels() - 1);
}

double alpha_of(const Genome& g, int agent, const AlphaGrid& grid) {
    return grid.alpha(g.levels[static_cast<std::size_t>(agent)]);
}

double mean_alpha(const Genome& g, const AlphaGrid& grid) {
    double s = 0.0;
    for (int i = 0; i < g.size(); ++i) s += alpha_of(g, i, grid);
    return g.size() ? s / g.size() : 0.0;
}

Genome uniform_genome(int n_agents, double alpha, const AlphaGrid& grid) {
    return {std::vector<int>(static_cast<std::size_t>(n_agents), grid.level_of(alpha))};
}

void validate(const GAConfig& ga) {
    const auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
    if (ga.pop_size < 1 || ga.generations < 1 || ga.episodes_per_eval < 1 || ga.tournament_size < 1)
        throw Error(ErrorCode::InvalidArgument, "GA sizes must be positive");
    if (!rate_ok(ga.crossover_rate) || !rate_ok(ga.mutation_rate))
        throw Error(ErrorCode::InvalidArgument, "GA rates must lie in [0, 1]");
    if (ga.elitism < 0 || ga.elitism >= ga.pop_size)
        throw Error(ErrorCode::InvalidArgument, "elitism must be < pop_size");
}

namespace {

std::vector<AgentSpec> specs_for(const Genome& g, const AlphaGrid& grid) {
    std::vector<AgentSpec> specs;
    specs.reserve(g.levels.size());
    for (int i = 0; i < g.size(); ++i) specs.push_back(AgentSpec::hybrid(alpha_of(g, i, grid)));
    return specs;
}

int tournament(const std::vector<double>& fitness, int size, Rng& rng) {
    int best = static_cast<int>(rng.below(fitness.size()));
    for (int k = 1; k < size; ++k) {
        const int c = static_cast<int>(rng.below(fitness.size()));
        const auto cf = fitness[static_cast<std::size_t>(c)], bf = fitness[static_cast<std::size_t>(best)];
        if (cf > bf || (cf == bf && c < best)) best = c;
    }
    return best;
}

}  // namespace

double evaluate_fitness(const Genome& genome, const SimConfig& config, int episodes, std::uint64_t eval_seed,
                        const AlphaGrid& grid) {
    if (genome.size() != config.n_agents)
        throw Error(ErrorCode::InvalidArgument, "genome length must equal n_agents");
    const auto specs = specs_for(genome, grid);
    double sum = 0.0;
    for (int e = 0; e < episodes; ++e)
        sum += run_episode(config, specs, derive_episode_seed(eval_seed, static_cast<std::uint64_t>(e))).normalized_payoff;
    return sum / episodes;
}

std::vector<Genome> next_generation(const std::vector<Genome>& population, const std::vector<double>& fitness,
                                    const GAConfig& ga, Rng& rng) {
    std::vector<int> order(population.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return fitness[static_cast<std::size_t>(a)] > fitness[static_cast<std::size_t>(b)];
    });

    std::vector<Genome> next;
    next.reserve(population.size());
    for (int e = 0; e < ga.elitism && e < static_cast<int>(order.size()); ++e)
        next.push_back(population[static_cast<std::size_t>(order[static_cast<std::size_t>(e)])]);

    const int levels = ga.grid.levels();
    while (next.size() < population.size()) {
        const Genome& a = population[static_cast<std::size_t>(tournament(fitness, ga.tournament_size, rng))];
        const Genome& b = population[static_cast<std::size_t>(tournament(fitness, ga.tournament_size, rng))];
        Genome child = a;
        if (rng.uniform() < ga.crossover_rate)
            for (std::size_t i = 0; i < child.levels.size(); ++i)
                if (rng.uniform() < 0.5) child.levels[i] = b.levels[i];
        for (auto& gene : child.levels)
            if (rng.uniform() < ga.mutation_rate) gene = static_cast<int>(rng.below(static_cast<std::uint64_t>(levels)));
        next.push_back(std::move(child));
    }
    return next;
}

EvolveResult evolve(const GAConfig& ga, const SimConfig& config) {
    validate(ga);
    validate_config(config);
    Rng rng(mix_pair(config.master_seed, 0x6A5EEDULL));

    EvolveResult result;
    result.eval_seed = mix_pair(config.master_seed, 0xF17E55ULL);
    const int levels = ga.grid.levels();

    std::vector<Genome> population(static_cast<std::size_t>(ga.pop_size));
    for (auto& g : population) {
        g.levels.resize(static_cast<std::size_t>(config.n_agents));
        for (auto& gene : g.levels) gene = static_cast<int>(rng.below(static_cast<std::uint64_t>(levels)));
    }

    std::map<Genome, double> cache;
    bool have_best = false;
    for (int gen = 0; gen < ga.generations; ++gen) {
        std::vector<Genome> fresh;
        for (const auto& g : population)
            if (!cache.contains(g) && std::find(fresh.begin(), fresh.end(), g) == fresh.end()) fresh.push_back(g);
        std::vector<double> scores(fresh.size());
        parallel_for(static_cast<int>(fresh.size()), ga.parallelism, [&](int i) {
            scores[static_cast<std::size_t>(i)] =
                evaluate_fitness(fresh[static_cast<std::size_t>(i)], config, ga.episodes_per_eval, result.eval_seed, ga.grid);
        });
        for (std::size_t i = 0; i < fresh.size(); ++i) cache.emplace(fresh[i], scores[i]);

        std::vector<double> fitness;
        fitness.reserve(population.size());
        for (const auto& g : population) fitness.push_back(cache.at(g));

        double sum = 0.0;
        for (std::size_t i = 0; i < population.size(); ++i) {
            sum += fitness[i];
            if (!have_best || fitness[i] > result.best_fitness) {
                result.best = population[i];
                result.best_fitness = fitness[i];
                have_best = true;
            }
        }
        result.history.push_back({gen, result.best_fitness, sum / static_cast<double>(population.size())});

        if (gen + 1 == ga.generations) {
            result.final_population = population;
            result.final_fitness = fitness;
        } else {
            population = next_generation(population, fitness, ga, rng);
        }
    }
    return result;
}

PayoffSplit payoff_split(const Genome& genome, const SimConfig& config, int episodes, std::uint64_t seed,
                         const AlphaGrid& grid, int parallelism) {
    SimConfig cfg = config;
    cfg.master_seed = seed;
    const auto specs = specs_for(genome, grid);
    const std::vector<AgentSpec> rational(static_cast<std::size_t>(cfg.n_agents), AgentSpec::rational_agent());
    const auto evolved = run_batch_episodes(cfg, specs, episodes, parallelism);
    const auto baseline = run_batch_episodes(cfg, rational, episodes, parallelism);

    const auto [lo, hi] = std::minmax_element(genome.levels.begin(), genome.levels.end());
    double max_sum = 0.0, min_sum = 0.0;
    int max_n = 0, min_n = 0;
    PayoffSplit out;
    for (std::size_t e = 0; e < evolved.size(); ++e) {
        for (int i = 0; i < genome.size(); ++i) {
            const double r = evolved[e].per_agent_rewards[static_cast<std::size_t>(i)];
            if (genome.levels[static_cast<std::size_t>(i)] == *hi) max_sum += r, ++max_n;
            if (genome.levels[static_cast<std::size_t>(i)] == *lo) min_sum += r, ++min_n;
        }
        out.group_payoff += evolved[e].normalized_payoff;
        out.rational_baseline += baseline[e].normalized_payoff;
    }
    out.max_alpha_payoff = max_n ? max_sum / max_n : 0.0;
    out.min_alpha_payoff = min_n ? min_sum / min_n : 0.0;
    out.group_payoff /= episodes;
    out.rational_baseline /= episodes;
    return out;
}

CsvTable history_table(const EvolveResult& r) {
    CsvTable t;
    t.header = {"generation", "best_fitness", "mean_fitness"};
    for (const auto& h : r.history) t.add(h.generation, h.best_fitness, h.mean_fitness);
    return t;
}

CsvTable distribution_table_header() {
    CsvTable t;
    t.header = {"theta", "alpha_bin", "population_share", "mean_alpha"};
    return t;
}

void append_distribution(CsvTable& table, int theta, const Genome& g, const AlphaGrid& grid) {
    const double mean = mean_alpha(g, grid);
    for (int level = 0; level < grid.levels(); ++level) {
        const auto count = std::count(g.levels.begin(), g.levels.end(), level);
        table.add(theta, grid.alpha(level), static_cast<double>(count) / g.size(), mean);
    }
}

CsvTable payoff_table_header() {
    CsvTable t;
    t.header = {"theta", "max_alpha_payoff", "min_alpha_payoff", "group_payoff", "rational_baseline"};
    return t;
}

}  // namespace willsim::evolve
