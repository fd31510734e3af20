#include "willsim/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace willsim {

TargetSet TargetSet::alive_of_kind(const GridState& s, PreyKind kind) {
    TargetSet ts;
    for (int g = 0; g < s.n_prey(); ++g) {
        const auto& p = s.prey[static_cast<std::size_t>(g)];
        if (p.alive && p.kind == kind) ts.prey.push_back(g);
    }
    return ts;
}

namespace {

int potential_at(const GridState& s, Position p, const TargetSet& targets) {
    int best = std::numeric_limits<int>::max();
    for (int g : targets.prey) best = std::min(best, manhattan(p, s.prey[static_cast<std::size_t>(g)].pos));
    return best;
}

}  // namespace

int potential(const GridState& s, int agent, const TargetSet& targets) {
    if (targets.empty()) throw Error(ErrorCode::EmptyTargetSet, "no targets");
    return potential_at(s, s.agent_pos[static_cast<std::size_t>(agent)], targets);
}

Action willed_action(const GridState& s, int agent, const TargetSet& targets, const SimConfig& config) {
    if (targets.empty()) throw Error(ErrorCode::EmptyTargetSet, "no targets");
    const Position here = s.agent_pos[static_cast<std::size_t>(agent)];
    if (potential_at(s, here, targets) == 0) {
        const int g = s.prey_at(here);
        if (g >= 0 && s.prey[static_cast<std::size_t>(g)].alive) return Action::Hunt;
    }
    Action best = Action::Idle;
    int best_d = std::numeric_limits<int>::max();
    for (Action a : kMoveActions) {
        const int d = potential_at(s, apply_move(here, a, config.grid_height, config.grid_width), targets);
        if (d < best_d) {
            best_d = d;
            best = a;
        }
    }
    return best;
}

ActionDist boltzmann_from_distances(std::span<const int, 5> distances, bool on_goal, double beta) {
    const int dmin = *std::min_element(distances.begin(), distances.end());
    ActionDist p{};
    double z = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        p[i] = std::exp(-beta * static_cast<double>(distances[i] - dmin));
        z += p[i];
    }
    for (std::size_t i = 0; i < 5; ++i) p[i] /= z;
    if (on_goal) {
        p[static_cast<std::size_t>(Action::Hunt)] = p[static_cast<std::size_t>(Action::Idle)];
        p[static_cast<std::size_t>(Action::Idle)] = 0.0;
    }
    return p;
}

BoltzmannKernel::BoltzmannKernel(double beta) {
    for (std::size_t k = 0; k < weight_.size(); ++k) weight_[k] = std::exp(-beta * static_cast<double>(k));
}

ActionDist BoltzmannKernel::dist(Position from, Position goal, int height, int width) const noexcept {
    std::array<int, 5> d{};
    for (std::size_t i = 0; i < 5; ++i) d[i] = manhattan(apply_move(from, kMoveActions[i], height, width), goal);
    const int dmin = *std::min_element(d.begin(), d.end());
    ActionDist p{};
    double z = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        p[i] = weight_[static_cast<std::size_t>(d[i] - dmin)];
        z += p[i];
    }
    for (std::size_t i = 0; i < 5; ++i) p[i] /= z;
    if (from == goal) {
        p[static_cast<std::size_t>(Action::Hunt)] = p[static_cast<std::size_t>(Action::Idle)];
        p[static_cast<std::size_t>(Action::Idle)] = 0.0;
    }
    return p;
}

Action BoltzmannKernel::sample(Position from, Position goal, int height, int width, Rng& rng) const noexcept {
    const ActionDist p = dist(from, goal, height, width);
    double u = rng.uniform();
    for (Action a : kAllActions) {
        u -= p[static_cast<std::size_t>(a)];
        if (u < 0.0) return a;
    }
    // Rounding left u marginally non-negative: take the last action with mass.
    for (auto it = kAllActions.rbegin(); it != kAllActions.rend(); ++it)
        if (p[static_cast<std::size_t>(*it)] > 0.0) return *it;
    return Action::Idle;
}

ActionDist boltzmann_action_dist(const GridState& s, int peer, int goal_prey, double beta,
                                 const SimConfig& config) {
    return BoltzmannKernel(beta).dist(s.agent_pos[static_cast<std::size_t>(peer)],
                                      s.prey[static_cast<std::size_t>(goal_prey)].pos, config.grid_height,
                                      config.grid_width);
}

Belief Belief::uniform(int n_agents, int n_prey) {
    Belief b;
    b.n_agents_ = n_agents;
    b.n_prey_ = n_prey;
    b.p_.assign(static_cast<std::size_t>(n_agents) * static_cast<std::size_t>(n_prey),
                n_prey > 0 ? 1.0 / n_prey : 0.0);
    return b;
}

namespace {

// Uniform over alive prey, or over all prey if none is alive.
void reset_row(std::span<double> row, const GridState& s) {
    int alive = 0;
    for (const auto& p : s.prey) alive += p.alive ? 1 : 0;
    for (std::size_t g = 0; g < row.size(); ++g) {
        if (alive == 0)
            row[g] = 1.0 / static_cast<double>(row.size());
        else
            row[g] = s.prey[g].alive ? 1.0 / alive : 0.0;
    }
}

bool normalize(std::span<double> row) {
    double z = 0.0;
    for (double v : row) z += v;
    if (!(z > 0.0)) return false;
    for (double& v : row) v /= z;
    return true;
}

}  // namespace

Belief update_beliefs(const Belief& belief, const GridState& prev, std::span<const Action> observed,
                      double beta, const SimConfig& config) {
    Belief next = belief;
    const BoltzmannKernel kernel(beta);
    for (int j = 0; j < belief.n_agents(); ++j) {
        if (prev.done(j)) continue;
        const Position pos = prev.agent_pos[static_cast<std::size_t>(j)];
        const auto a = static_cast<std::size_t>(observed[static_cast<std::size_t>(j)]);
        auto row = next.row(j);
        for (int g = 0; g < belief.n_prey(); ++g) {
            const auto gi = static_cast<std::size_t>(g);
            if (row[gi] == 0.0) continue;
            row[gi] *= kernel.dist(pos, prev.prey[gi].pos, config.grid_height, config.grid_width)[a];
        }
        if (!normalize(row)) {
            reset_row(row, prev);
            next.note_reset();
        }
    }
    return next;
}

void retire_dead_prey(Belief& belief, const GridState& state) {
    bool any_dead = false;
    for (const auto& p : state.prey) any_dead = any_dead || !p.alive;
    if (!any_dead) return;
    for (int j = 0; j < belief.n_agents(); ++j) {
        auto row = belief.row(j);
        for (std::size_t g = 0; g < row.size(); ++g)
            if (!state.prey[g].alive) row[g] = 0.0;
        if (!normalize(row)) {
            reset_row(row, state);
            belief.note_reset();
        }
    }
}

namespace {

// Rollout restricted to the peers whose sampled goal is `goal`.
double rollout_on_goal(const GridState& s, int agent, int goal, std::span<const int> rivals,
                       const SimConfig& config, const BoltzmannKernel& kernel, double gamma, Rng& rng) {
    const auto& prey = s.prey[static_cast<std::size_t>(goal)];
    if (!prey.alive || s.done(agent)) return 0.0;
    const int remaining = config.horizon - s.t;
    // The agent's own path is deterministic: it reaches the goal after
    // `arrival` moves and hunts from then on.
    const int arrival = manhattan(s.agent_pos[static_cast<std::size_t>(agent)], prey.pos);
    if (arrival >= remaining) return 0.0;
    const bool stag = prey.kind == PreyKind::Stag;
    const int n_rivals = static_cast<int>(rivals.size());
    if (stag && n_rivals + 1 < config.threshold) return 0.0;
    if (n_rivals == 0) {
        const double reward = stag ? config.stag_total_reward() : config.hare_reward;
        return std::pow(gamma, arrival) * reward;
    }

    std::vector<Position> pos(rivals.size());
    for (std::size_t r = 0; r < rivals.size(); ++r) pos[r] = s.agent_pos[static_cast<std::size_t>(rivals[r])];
    double discount = 1.0;
    for (int tau = 0; tau < remaining; ++tau, discount *= gamma) {
        const bool self_hunts = tau >= arrival;
        int hunting = self_hunts ? 1 : 0;
        for (auto& p : pos) {
            const Action a = kernel.sample(p, prey.pos, config.grid_height, config.grid_width, rng);
            if (a == Action::Hunt)
                ++hunting;
            else
                p = apply_move(p, a, config.grid_height, config.grid_width);
        }
        if (stag) {
            if (hunting < config.threshold) continue;
            return self_hunts ? discount * config.stag_total_reward() / hunting : 0.0;
        }
        if (hunting == 0) continue;
        if (!self_hunts) return 0.0;
        const bool self_wins = hunting == 1 || rng.below(static_cast<std::uint64_t>(hunting)) == 0;
        return self_wins ? discount * config.hare_reward : 0.0;
    }
    return 0.0;
}

}  // namespace

double rollout_value(const GridState& s, int agent, int own_goal, std::span<const int> peer_goals,
                     const SimConfig& config, const RationalParams& params, Rng& rng) {
    std::vector<int> rivals;
    for (int j = 0; j < s.n_agents(); ++j)
        if (j != agent && !s.done(j) && peer_goals[static_cast<std::size_t>(j)] == own_goal) rivals.push_back(j);
    return rollout_on_goal(s, agent, own_goal, rivals, config, BoltzmannKernel(params.beta), params.gamma, rng);
}

RationalChoice rational_action(const GridState& s, int agent, const Belief& belief,
                               const SimConfig& config, const RationalParams& params, Rng& rng) {
    const int n_prey = s.n_prey();
    std::vector<int> candidates;
    for (int g = 0; g < n_prey; ++g)
        if (s.prey[static_cast<std::size_t>(g)].alive) candidates.push_back(g);
    if (candidates.empty()) throw Error(ErrorCode::NoAlivePrey, "nothing to plan for");

    // Cumulative belief rows for the peers that still act.
    std::vector<int> peers;
    std::vector<double> cdf;
    for (int j = 0; j < s.n_agents(); ++j) {
        if (j == agent || s.done(j)) continue;
        peers.push_back(j);
        double acc = 0.0;
        for (double v : belief.row(j)) cdf.push_back(acc += v);
    }

    const BoltzmannKernel kernel(params.beta);
    std::vector<double> total(static_cast<std::size_t>(n_prey), 0.0);
    std::vector<std::vector<int>> rivals(static_cast<std::size_t>(n_prey));
    for (int k = 0; k < params.rollouts; ++k) {
        for (auto& r : rivals) r.clear();
        for (std::size_t pi = 0; pi < peers.size(); ++pi) {
            const auto first = cdf.begin() + static_cast<std::ptrdiff_t>(pi * static_cast<std::size_t>(n_prey));
            const auto last = first + n_prey;
            const double u = rng.uniform() * *(last - 1);
            auto it = std::upper_bound(first, last, u);
            if (it == last) --it;
            rivals[static_cast<std::size_t>(it - first)].push_back(peers[pi]);
        }
        for (int g : candidates)
            total[static_cast<std::size_t>(g)] += rollout_on_goal(s, agent, g, rivals[static_cast<std::size_t>(g)],
                                                                  config, kernel, params.gamma, rng);
    }

    RationalChoice choice;
    choice.mean_values.assign(static_cast<std::size_t>(n_prey), 0.0);
    double best = -std::numeric_limits<double>::infinity();
    for (int g : candidates) {
        const double v = total[static_cast<std::size_t>(g)] / params.rollouts;
        choice.mean_values[static_cast<std::size_t>(g)] = v;
        if (v > best) {
            best = v;
            choice.goal = g;
        }
    }
    choice.action = willed_action(s, agent, TargetSet::single(choice.goal), config);
    return choice;
}

WillClock WillClock::from_alpha(double alpha, int horizon) {
    return {ceil_tolerant(std::abs(alpha) * horizon), alpha < 0.0 ? PreyKind::Hare : PreyKind::Stag};
}

bool replans_at(const EndogenousStrategy& strategy, int t, int horizon) {
    using V = EndogenousStrategy::Variant;
    switch (strategy.variant) {
        case V::PureRational: return true;
        case V::Intermittent: {
            const long period = std::max(1L, std::lround(1.0 / strategy.ratio));
            return t % period == 0;
        }
        case V::Phased: return t < ceil_tolerant(strategy.ratio * horizon);
        case V::Instant: return t == 0;
    }
    return true;
}

namespace {

Decision plan_rational(const GridState& s, int agent, const Belief& belief, const SimConfig& config,
                       const RationalParams& params, Rng& rng) {
    for (const auto& p : s.prey)
        if (p.alive) {
            const RationalChoice c = rational_action(s, agent, belief, config, params, rng);
            return {c.action, c.goal};
        }
    return {};
}

Decision descend(const GridState& s, int agent, const TargetSet& targets, const SimConfig& config) {
    const Action a = willed_action(s, agent, targets, config);
    int goal = targets.prey.front();
    int best = std::numeric_limits<int>::max();
    const Position here = s.agent_pos[static_cast<std::size_t>(agent)];
    for (int g : targets.prey) {
        const int d = manhattan(here, s.prey[static_cast<std::size_t>(g)].pos);
        if (d < best) {
            best = d;
            goal = g;
        }
    }
    return {a, goal};
}

}  // namespace

Decision act(const AgentSpec& spec, const GridState& s, int agent, const Belief& belief,
             AgentMemory& memory, const SimConfig& config, Rng& rng) {
    if (s.done(agent)) return {};
    return std::visit(
        [&](const auto& m) -> Decision {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, mode::Willed>) {
                const TargetSet targets = TargetSet::alive_of_kind(s, m.target);
                if (targets.empty()) return {};
                return descend(s, agent, targets, config);
            } else if constexpr (std::is_same_v<M, mode::Rational>) {
                return plan_rational(s, agent, belief, config, spec.rational, rng);
            } else if constexpr (std::is_same_v<M, mode::Hybrid>) {
                const WillClock clock = WillClock::from_alpha(m.alpha, config.horizon);
                if (clock.willed_at(s.t)) {
                    const TargetSet targets = TargetSet::alive_of_kind(s, clock.target);
                    if (!targets.empty()) return descend(s, agent, targets, config);
                }
                return plan_rational(s, agent, belief, config, spec.rational, rng);
            } else {
                const bool locked_alive =
                    memory.locked_target && s.prey[static_cast<std::size_t>(*memory.locked_target)].alive;
                if (!locked_alive || replans_at(m.strategy, s.t, config.horizon)) {
                    const Decision d = plan_rational(s, agent, belief, config, spec.rational, rng);
                    memory.locked_target = d.goal >= 0 ? std::optional<int>(d.goal) : std::nullopt;
                    return d;
                }
                const int g = *memory.locked_target;
                return {willed_action(s, agent, TargetSet::single(g), config), g};
            }
        },
        spec.mode);
}

}  // namespace willsim
