#include "willsim/harness.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "willsim/env.hpp"
#include "willsim/policy.hpp"
#include "willsim/rng.hpp"

namespace willsim {

namespace {

// Stream keys under an episode seed.
constexpr std::uint64_t kResetStream = 1;
constexpr std::uint64_t kHuntStream = 2;
constexpr std::uint64_t kAgentStreamBase = 0x100;

bool needs_beliefs(std::span<const AgentSpec> specs) {
    for (const auto& s : specs)
        if (!std::holds_alternative<mode::Willed>(s.mode)) return true;
    return false;
}

double belief_beta(std::span<const AgentSpec> specs) {
    for (const auto& s : specs)
        if (!std::holds_alternative<mode::Willed>(s.mode)) return s.rational.beta;
    return RationalParams{}.beta;
}

}  // namespace

EpisodeResult run_episode(const SimConfig& config, std::span<const AgentSpec> specs, std::uint64_t seed,
                          bool record_trace) {
    validate_config(config);
    if (static_cast<int>(specs.size()) != config.n_agents)
        throw Error(ErrorCode::InvalidArgument, "need one AgentSpec per agent");

    const int n = config.n_agents;
    Rng reset_rng(mix_pair(seed, kResetStream));
    Rng hunt_rng(mix_pair(seed, kHuntStream));
    GridState state = reset(config, reset_rng);

    const bool track_beliefs = needs_beliefs(specs);
    // All observers share one posterior table; see Belief.
    const double beta = belief_beta(specs);
    Belief belief = track_beliefs ? Belief::uniform(n, config.n_prey()) : Belief{};
    std::vector<AgentMemory> memory(static_cast<std::size_t>(n));

    EpisodeResult result;
    result.per_agent_rewards.assign(static_cast<std::size_t>(n), 0.0);
    std::vector<Action> joint(static_cast<std::size_t>(n));
    std::vector<int> goals(static_cast<std::size_t>(n));

    while (state.t < config.horizon) {
        const std::uint64_t step_seed = mix_pair(seed, kAgentStreamBase + static_cast<std::uint64_t>(state.t));
        for (int i = 0; i < n; ++i) {
            Rng rng(mix_pair(step_seed, static_cast<std::uint64_t>(i)));
            const Decision d = act(specs[static_cast<std::size_t>(i)], state, i, belief,
                                   memory[static_cast<std::size_t>(i)], config, rng);
            joint[static_cast<std::size_t>(i)] = d.action;
            goals[static_cast<std::size_t>(i)] = d.goal;
        }
        auto [next, outcome] = step(state, joint, config, hunt_rng);
        if (record_trace) result.trace.push_back(trace_record(state.t, joint, outcome, goals));
        for (int i = 0; i < n; ++i) result.per_agent_rewards[static_cast<std::size_t>(i)] += outcome.rewards[static_cast<std::size_t>(i)];
        for (const auto& e : outcome.hunt_events) {
            if (state.prey[static_cast<std::size_t>(e.prey_index)].kind == PreyKind::Stag)
                ++result.stags_captured;
            else
                ++result.hares_captured;
        }
        if (track_beliefs) {
            belief = update_beliefs(belief, state, joint, beta, config);
            retire_dead_prey(belief, next);
        }
        state = std::move(next);
    }

    for (double r : result.per_agent_rewards) result.total_reward += r;
    result.normalized_payoff = normalized_group_payoff(result.total_reward, config);
    return result;
}

BatchStats summarize(std::span<const double> values) {
    BatchStats st;
    st.n_episodes = static_cast<int>(values.size());
    if (values.empty()) return st;
    double sum = 0.0;
    for (double v : values) sum += v;
    st.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - st.mean) * (v - st.mean);
        st.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
        st.ci95_halfwidth = 1.96 * st.sd / std::sqrt(static_cast<double>(values.size()));
    }
    return st;
}

void parallel_for(int n, int parallelism, const std::function<void(int)>& body) {
    if (parallelism <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    const int workers = std::min(parallelism, n);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

std::vector<EpisodeResult> run_batch_episodes(const SimConfig& config, std::span<const AgentSpec> specs,
                                              int n_episodes, int parallelism) {
    validate_config(config);
    std::vector<EpisodeResult> results(static_cast<std::size_t>(n_episodes));
    parallel_for(n_episodes, parallelism, [&](int i) {
        results[static_cast<std::size_t>(i)] =
            run_episode(config, specs, derive_episode_seed(config.master_seed, static_cast<std::uint64_t>(i)));
    });
    return results;
}

BatchStats run_batch(const SimConfig& config, std::span<const AgentSpec> specs, int n_episodes, int parallelism) {
    if (n_episodes < 2) throw Error(ErrorCode::InvalidArgument, "a batch needs at least two episodes");
    const auto results = run_batch_episodes(config, specs, n_episodes, parallelism);
    std::vector<double> payoff;
    payoff.reserve(results.size());
    for (const auto& r : results) payoff.push_back(r.normalized_payoff);
    return summarize(payoff);
}

std::vector<AgentSpec> composition_specs(const Composition& c) {
    std::vector<AgentSpec> specs;
    specs.insert(specs.end(), static_cast<std::size_t>(c.willed_stag), AgentSpec::willed(PreyKind::Stag));
    specs.insert(specs.end(), static_cast<std::size_t>(c.rational), AgentSpec::rational_agent());
    specs.insert(specs.end(), static_cast<std::size_t>(c.willed_hare), AgentSpec::willed(PreyKind::Hare));
    return specs;
}

std::vector<Composition> simplex_grid(int n_agents, int step) {
    std::vector<Composition> out;
    if (step < 1) step = 1;
    for (int stag = 0; stag <= n_agents; stag += step)
        for (int hare = 0; stag + hare <= n_agents; hare += step)
            out.push_back({stag, n_agents - stag - hare, hare});
    return out;
}

CsvTable sweep_compositions(const SimConfig& base, std::span<const int> thetas,
                            std::span<const Composition> compositions, const SweepOptions& opt) {
    CsvTable table;
    table.header = {"theta", "n_willed_stag", "n_rational", "n_willed_hare", "mean", "ci95"};
    for (int theta : thetas) {
        SimConfig cfg = base;
        cfg.threshold = theta;
        for (const auto& c : compositions) {
            const auto specs = composition_specs(c);
            const BatchStats st = run_batch(cfg, specs, opt.episodes, opt.parallelism);
            table.add(theta, c.willed_stag, c.rational, c.willed_hare, st.mean, st.ci95_halfwidth);
        }
    }
    return table;
}

CsvTable sweep_composition(const SimConfig& base, std::span<const int> thetas, std::span<const int> willed_counts,
                           const SweepOptions& opt) {
    std::vector<Composition> comps;
    for (int k : willed_counts) {
        if (k < 0 || k > base.n_agents)
            throw Error(ErrorCode::InvalidArgument, "willed count outside [0, n_agents]");
        comps.push_back({k, base.n_agents - k, 0});
    }
    return sweep_compositions(base, thetas, comps, opt);
}

CsvTable sweep_strength(const SimConfig& base, std::span<const int> thetas, std::span<const double> alphas,
                        const SweepOptions& opt) {
    CsvTable table;
    table.header = {"theta", "alpha", "mean", "ci95"};
    for (int theta : thetas) {
        SimConfig cfg = base;
        cfg.threshold = theta;
        for (double alpha : alphas) {
            const std::vector<AgentSpec> specs(static_cast<std::size_t>(cfg.n_agents), AgentSpec::hybrid(alpha));
            const BatchStats st = run_batch(cfg, specs, opt.episodes, opt.parallelism);
            table.add(theta, alpha, st.mean, st.ci95_halfwidth);
        }
    }
    return table;
}

std::vector<double> alpha_grid(double step) {
    std::vector<double> out;
    const int n = static_cast<int>(std::lround(2.0 / step));
    for (int i = 0; i <= n; ++i) {
        // Round to 10 decimals so grid values print cleanly (0.3, not 0.30000000000000004).
        const double a = -1.0 + 2.0 * i / n;
        out.push_back(std::round(a * 1e10) / 1e10);
    }
    return out;
}

std::vector<StrategyCell> endogenous_strategies(std::span<const double> ratios, int horizon) {
    using V = EndogenousStrategy::Variant;
    std::vector<StrategyCell> out;
    out.push_back({{V::PureRational, 1.0}, "pure_rational"});
    for (double k : ratios) {
        out.push_back({{V::Intermittent, k}, "intermittent"});
        out.push_back({{V::Phased, k}, "phased"});
    }
    out.push_back({{V::Instant, 1.0 / horizon}, "instant"});
    return out;
}

CsvTable run_endogenous(const SimConfig& base, std::span<const double> rs_bars, std::span<const double> ratios,
                        const SweepOptions& opt) {
    CsvTable table;
    table.header = {"strategy", "k", "rs_bar", "mean", "ci95"};
    const auto strategies = endogenous_strategies(ratios, base.horizon);
    for (double rs : rs_bars) {
        SimConfig cfg = base;
        cfg.stag_share = rs;
        for (const auto& cell : strategies) {
            const std::vector<AgentSpec> specs(static_cast<std::size_t>(cfg.n_agents),
                                               AgentSpec::endogenous(cell.strategy));
            const BatchStats st = run_batch(cfg, specs, opt.episodes, opt.parallelism);
            table.add(cell.name, cell.strategy.ratio, rs, st.mean, st.ci95_halfwidth);
        }
    }
    return table;
}

}  // namespace willsim
