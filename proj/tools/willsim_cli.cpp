#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "willsim/dynamics.hpp"
#include "willsim/evolve.hpp"
#include "willsim/harness.hpp"

using namespace willsim;

namespace {

constexpr int kExitConfig = 2;

struct Shared {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    int episodes = 300;
    int parallelism = 1;
    std::string out;
    std::optional<int> horizon;
};

void add_shared(CLI::App* cmd, Shared& s) {
    cmd->add_option("--config", s.config_path, "JSON SimConfig file");
    cmd->add_option("--seed", s.seed, "master seed");
    cmd->add_option("--episodes", s.episodes, "episodes per cell")->check(CLI::PositiveNumber);
    cmd->add_option("--parallelism", s.parallelism, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out", s.out, "output CSV path (stdout if omitted)");
    cmd->add_option("--horizon", s.horizon, "episode length T");
}

// Base config: the file if given, otherwise `fallback`; then flag overrides.
SimConfig load_config(const Shared& s, SimConfig fallback) {
    SimConfig c = fallback;
    if (!s.config_path.empty()) {
        std::ifstream in(s.config_path);
        if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read config file " + s.config_path);
        std::stringstream buf;
        buf << in.rdbuf();
        c = config_from_json(buf.str());
    }
    if (s.seed) c.master_seed = *s.seed;
    if (s.horizon) c.horizon = *s.horizon;
    validate_config(c);
    return c;
}

void emit(const CsvTable& t, const std::string& path) {
    if (path.empty())
        std::cout << t.str();
    else
        t.write(path);
}

SimConfig ga_setup() {
    SimConfig c;
    c.n_agents = 10;
    c.n_stags = 2;
    c.n_hares = 10;
    c.stag_share = 10;
    c.horizon = 10;
    return c;
}

std::vector<AgentSpec> population(const std::string& kind, int n) {
    AgentSpec spec = AgentSpec::rational_agent();
    if (kind == "rational") {
    } else if (kind == "willed-stag") {
        spec = AgentSpec::willed(PreyKind::Stag);
    } else if (kind == "willed-hare") {
        spec = AgentSpec::willed(PreyKind::Hare);
    } else if (kind.rfind("hybrid:", 0) == 0) {
        spec = AgentSpec::hybrid(std::stod(kind.substr(7)));
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown population '" + kind + "'");
    }
    return std::vector<AgentSpec>(static_cast<std::size_t>(n), spec);
}

// "x.csv" with theta 4 -> "x.theta4.csv".
std::string with_theta(const std::string& path, int theta) {
    const auto dot = path.rfind('.');
    const auto slash = path.find_last_of('/');
    const std::string tag = ".theta" + std::to_string(theta);
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + tag;
    return path.substr(0, dot) + tag + path.substr(dot);
}

// i * step without the binary fuzz (0.1 * 3 -> 0.3).
double on_grid(int i, double step) { return std::round(i * step * 1e10) / 1e10; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Willed and rational agents in the Markov Stag Hunt"};
    app.require_subcommand(1);

    Shared sh;

    // simulate
    auto* sim = app.add_subcommand("simulate", "play one episode");
    add_shared(sim, sh);
    std::string sim_pop = "rational";
    std::string trace_path;
    sim->add_option("--population", sim_pop, "rational | willed-stag | willed-hare | hybrid:<alpha>");
    sim->add_option("--trace", trace_path, "write a JSON-lines step trace");

    // sweep-composition
    auto* comp = app.add_subcommand("sweep-composition", "payoff against the number of willed stag hunters");
    add_shared(comp, sh);
    std::vector<int> comp_thetas{2, 3, 4, 5, 6};
    std::vector<int> comp_counts;
    bool ternary = false;
    int simplex_step = 2;
    comp->add_option("--thetas", comp_thetas)->delimiter(',');
    comp->add_option("--counts", comp_counts, "willed-stag counts (default 0..N step 2)")->delimiter(',');
    comp->add_flag("--ternary", ternary, "sweep the full stag/rational/hare simplex");
    comp->add_option("--simplex-step", simplex_step)->check(CLI::PositiveNumber);

    // sweep-strength
    auto* strength = app.add_subcommand("sweep-strength", "homogeneous hybrid populations over alpha");
    add_shared(strength, sh);
    std::vector<int> strength_thetas{2, 3, 4, 5, 6};
    double alpha_step = 0.1;
    strength->add_option("--thetas", strength_thetas)->delimiter(',');
    strength->add_option("--alpha-step", alpha_step)->check(CLI::PositiveNumber);

    // evolve
    auto* evo = app.add_subcommand("evolve", "genetic search over per-agent will strengths");
    add_shared(evo, sh);
    std::vector<int> evo_thetas{4};
    evolve::GAConfig ga;
    std::string history_out;
    std::string payoff_out;
    evo->add_option("--thetas", evo_thetas)->delimiter(',');
    evo->add_option("--pop-size", ga.pop_size);
    evo->add_option("--generations", ga.generations);
    evo->add_option("--episodes-per-eval", ga.episodes_per_eval);
    evo->add_option("--tournament", ga.tournament_size);
    evo->add_option("--crossover", ga.crossover_rate);
    evo->add_option("--mutation", ga.mutation_rate);
    evo->add_option("--elitism", ga.elitism);
    evo->add_option("--history-out", history_out, "per-generation fitness CSV");
    evo->add_option("--payoff-out", payoff_out, "individual versus group payoff CSV");

    // endogenous
    auto* endo = app.add_subcommand("endogenous", "endogenous goal-selection schedules");
    add_shared(endo, sh);
    std::vector<double> rs_bars{10, 50};
    std::vector<double> ratios{0.5, 0.2, 0.1};
    int endo_theta = 4;
    endo->add_option("--rs-bar", rs_bars)->delimiter(',');
    endo->add_option("--ratios", ratios)->delimiter(',');
    endo->add_option("--theta", endo_theta);

    // dynamics
    auto* dyn = app.add_subcommand("dynamics", "population dynamics with willed fractions");
    add_shared(dyn, sh);
    std::string dyn_mode = "equilibria";
    double grid_step = 0.1;
    dynamics::SDEParams sde;
    sde.sigma = 0.15;
    double n1_max = 0.7;
    int trials = 500;
    dyn->add_option("--mode", dyn_mode)->check(CLI::IsMember({"equilibria", "escape"}));
    dyn->add_option("--grid-step", grid_step)->check(CLI::PositiveNumber);
    dyn->add_option("--sigma", sde.sigma);
    dyn->add_option("--dt", sde.dt);
    dyn->add_option("--t-max", sde.t_max);
    dyn->add_option("--move-rate", sde.move_rate);
    dyn->add_option("--n1-max", n1_max);
    dyn->add_option("--trials", trials)->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            const SimConfig c = load_config(sh, SimConfig{});
            const auto specs = population(sim_pop, c.n_agents);
            const auto r = run_episode(c, specs, derive_episode_seed(c.master_seed, 0), !trace_path.empty());
            if (!trace_path.empty()) {
                std::ofstream tr(trace_path);
                for (const auto& line : r.trace) tr << line << '\n';
            }
            CsvTable t{{"total_reward", "normalized_payoff", "stags_captured", "hares_captured"}, {}};
            t.add(r.total_reward, r.normalized_payoff, r.stags_captured, r.hares_captured);
            emit(t, sh.out);
        } else if (*comp) {
            SimConfig fallback;
            fallback.horizon = 50;
            const SimConfig c = load_config(sh, fallback);
            const SweepOptions opt{sh.episodes, sh.parallelism};
            if (ternary) {
                const auto grid = simplex_grid(c.n_agents, simplex_step);
                emit(sweep_compositions(c, comp_thetas, grid, opt), sh.out);
            } else {
                if (comp_counts.empty())
                    for (int n = 0; n <= c.n_agents; n += 2) comp_counts.push_back(n);
                emit(sweep_composition(c, comp_thetas, comp_counts, opt), sh.out);
            }
        } else if (*strength) {
            SimConfig fallback;
            fallback.horizon = 10;
            const SimConfig c = load_config(sh, fallback);
            const auto alphas = alpha_grid(alpha_step);
            emit(sweep_strength(c, strength_thetas, alphas, {sh.episodes, sh.parallelism}), sh.out);
        } else if (*evo) {
            const SimConfig base = load_config(sh, ga_setup());
            ga.parallelism = sh.parallelism;
            evolve::validate(ga);
            CsvTable dist = evolve::distribution_table_header();
            CsvTable payoff = evolve::payoff_table_header();
            for (int theta : evo_thetas) {
                SimConfig c = base;
                c.threshold = theta;
                validate_config(c);
                const auto r = evolve::evolve(ga, c);
                evolve::append_distribution(dist, theta, r.best, ga.grid);
                const auto split = evolve::payoff_split(r.best, c, sh.episodes, mix_pair(c.master_seed, 0xB5E7),
                                                        ga.grid, sh.parallelism);
                payoff.add(theta, split.max_alpha_payoff, split.min_alpha_payoff, split.group_payoff,
                           split.rational_baseline);
                if (!history_out.empty()) {
                    const std::string path = evo_thetas.size() > 1 ? with_theta(history_out, theta) : history_out;
                    evolve::history_table(r).write(path);
                }
            }
            emit(dist, sh.out);
            if (!payoff_out.empty()) payoff.write(payoff_out);
        } else if (*endo) {
            SimConfig fallback;
            fallback.horizon = 50;
            SimConfig c = load_config(sh, fallback);
            c.threshold = endo_theta;
            validate_config(c);
            emit(run_endogenous(c, rs_bars, ratios, {sh.episodes, sh.parallelism}), sh.out);
        } else if (*dyn) {
            const std::uint64_t seed = sh.seed.value_or(0);
            const int steps = static_cast<int>(std::lround(1.0 / grid_step));
            if (dyn_mode == "equilibria") {
                CsvTable t{{"game", "n1", "n2", "x_star", "classification"}, {}};
                for (auto kind : {dynamics::GameKind::StagHunt, dynamics::GameKind::Snowdrift,
                                  dynamics::GameKind::PrisonersDilemma}) {
                    const auto game = dynamics::PopulationGame::defaults(kind);
                    for (int i = 0; i <= steps; ++i)
                        for (int j = 0; i + j <= steps; ++j) {
                            const dynamics::WillShares w{on_grid(i, grid_step), on_grid(j, grid_step)};
                            for (const auto& e : dynamics::find_equilibria(game, w))
                                t.add(dynamics::to_string(kind), w.n1, w.n2, e.x_star,
                                      dynamics::to_string(e.classification));
                        }
                }
                emit(t, sh.out);
            } else {
                const auto game = dynamics::PopulationGame::stag_hunt();
                CsvTable t{{"n1", "sigma", "mean_tau", "ci95", "censored_fraction", "barrier"}, {}};
                for (int i = 0; i * grid_step <= n1_max + 1e-9; ++i) {
                    const dynamics::WillShares w{on_grid(i, grid_step), 0.0};
                    const auto st = dynamics::escape_time(game, w, sde, trials, mix_pair(seed, static_cast<std::uint64_t>(i)),
                                                         sh.parallelism);
                    t.add(w.n1, sde.sigma, st.mean_tau, st.ci95, st.censored_fraction,
                          dynamics::barrier_integral(game, w));
                }
                emit(t, sh.out);
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.code()) {
            case ErrorCode::ThresholdExceedsAgents:
            case ErrorCode::GridTooSmall:
            case ErrorCode::NegativeReward:
            case ErrorCode::InvalidConfig:
            case ErrorCode::UnknownField:
                return kExitConfig;
            default:
                return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
