#include "doctest.h"
#include "willsim/evolve.hpp"
#include "willsim/harness.hpp"

using namespace willsim;
using namespace willsim::evolve;

namespace {

// Small version of the heterogeneous-population setup.
SimConfig ga_config(int theta) {
    SimConfig c;
    c.grid_height = c.grid_width = 8;
    c.n_agents = 6;
    c.n_stags = 1;
    c.n_hares = 6;
    c.stag_share = 10;
    c.threshold = theta;
    c.horizon = 8;
    c.master_seed = 5;
    return c;
}

}  // namespace

TEST_CASE("alpha grid") {
    const AlphaGrid g;
    CHECK(g.levels() == 11);
    CHECK(g.alpha(0) == -1.0);
    CHECK(g.alpha(5) == 0.0);
    CHECK(g.alpha(10) == 1.0);
    CHECK(g.alpha(8) == 0.6);
    for (int l = 0; l < g.levels(); ++l) CHECK(g.level_of(g.alpha(l)) == l);
    CHECK(mean_alpha(uniform_genome(4, 0.4, g), g) == doctest::Approx(0.4));
}

TEST_CASE("GAConfig validation") {
    GAConfig ga;
    CHECK_NOTHROW(validate(ga));
    ga.elitism = ga.pop_size;
    CHECK_THROWS_AS(validate(ga), Error);
    ga = {};
    ga.mutation_rate = 1.5;
    CHECK_THROWS_AS(validate(ga), Error);
}

TEST_CASE("evaluate_fitness") {
    const SimConfig c = ga_config(2);
    const AlphaGrid grid;
    const Genome zeros = uniform_genome(c.n_agents, 0.0, grid);
    SUBCASE("all-zero genome equals the rational population") {
        const std::vector<AgentSpec> rational(static_cast<std::size_t>(c.n_agents), AgentSpec::rational_agent());
        double sum = 0;
        for (int e = 0; e < 6; ++e) sum += run_episode(c, rational, derive_episode_seed(77, static_cast<std::uint64_t>(e))).normalized_payoff;
        CHECK(evaluate_fitness(zeros, c, 6, 77, grid) == sum / 6);
    }
    SUBCASE("deterministic") {
        const Genome g{{0, 3, 5, 7, 10, 2}};
        CHECK(evaluate_fitness(g, c, 5, 3, grid) == evaluate_fitness(g, c, 5, 3, grid));
    }
    SUBCASE("length mismatch") {
        CHECK_THROWS_AS(evaluate_fitness(Genome{{1, 2}}, c, 1, 0, grid), Error);
    }
}

TEST_CASE("no variation operators keep the population fixed") {
    GAConfig ga;
    ga.crossover_rate = 0;
    ga.mutation_rate = 0;
    ga.pop_size = 6;
    ga.elitism = 1;
    const Genome g{{1, 4, 6, 9, 2, 5}};
    std::vector<Genome> pop(6, g);
    const std::vector<double> fit(6, 0.5);
    Rng rng(1);
    for (int gen = 0; gen < 5; ++gen) {
        pop = next_generation(pop, fit, ga, rng);
        for (const auto& x : pop) CHECK(x == g);
    }
}

TEST_CASE("mutation keeps genes on the grid") {
    GAConfig ga;
    ga.mutation_rate = 1.0;
    ga.pop_size = 10;
    std::vector<Genome> pop(10, Genome{{0, 0, 0, 0}});
    std::vector<double> fit(10, 0.0);
    Rng rng(2);
    for (int gen = 0; gen < 20; ++gen) {
        pop = next_generation(pop, fit, ga, rng);
        for (const auto& x : pop)
            for (int l : x.levels) {
                CHECK(l >= 0);
                CHECK(l < ga.grid.levels());
            }
    }
}

TEST_CASE("elites survive selection") {
    GAConfig ga;
    ga.pop_size = 5;
    ga.elitism = 2;
    std::vector<Genome> pop;
    for (int i = 0; i < 5; ++i) pop.push_back(Genome{{i, i}});
    const std::vector<double> fit{0.1, 0.9, 0.3, 0.8, 0.2};
    Rng rng(3);
    const auto next = next_generation(pop, fit, ga, rng);
    CHECK(next[0] == pop[1]);
    CHECK(next[1] == pop[3]);
}

TEST_CASE("evolve") {
    GAConfig ga;
    ga.pop_size = 8;
    ga.generations = 4;
    ga.episodes_per_eval = 3;
    ga.elitism = 2;
    const SimConfig c = ga_config(3);
    const auto r = evolve::evolve(ga, c);
    REQUIRE(r.history.size() == 4);
    for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i].best_fitness >= r.history[i - 1].best_fitness);
    CHECK(r.final_population.size() == 8);
    CHECK(r.best.size() == c.n_agents);
    // Frozen seeds: re-scoring the best genome reproduces its fitness.
    CHECK(evaluate_fitness(r.best, c, ga.episodes_per_eval, r.eval_seed, ga.grid) == r.best_fitness);

    const auto again = evolve::evolve(ga, c);
    CHECK(again.best == r.best);
    CHECK(again.history.back().mean_fitness == r.history.back().mean_fitness);

    CsvTable dist = distribution_table_header();
    append_distribution(dist, 3, r.best, ga.grid);
    CHECK(dist.rows.size() == 11);
    CHECK(history_table(r).rows.size() == 4);
}

TEST_CASE("payoff_split") {
    const SimConfig c = ga_config(2);
    const Genome g{{10, 10, 5, 5, 0, 0}};
    const auto split = payoff_split(g, c, 4, 9);
    CHECK(split.group_payoff >= 0.0);
    CHECK(split.group_payoff <= 1.0);
    CHECK(split.rational_baseline >= 0.0);
    const auto same = payoff_split(uniform_genome(6, 0.0, {}), c, 4, 9);
    CHECK(same.group_payoff == same.rational_baseline);
}
