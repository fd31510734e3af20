#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "willsim/core.hpp"
#include "willsim/env.hpp"
#include "willsim/rng.hpp"

namespace willsim {

/// Indices into GridState::prey that a willed agent descends toward.
struct TargetSet {
    std::vector<int> prey;

    bool empty() const noexcept { return prey.empty(); }

    static TargetSet alive_of_kind(const GridState& s, PreyKind kind);
    static TargetSet single(int prey_index) { return {{prey_index}}; }
};

/// Manhattan distance from the agent to the nearest target.
int potential(const GridState& s, int agent, const TargetSet& targets);

/// Greedy descent on the potential field; Hunt when standing on a target.
/// Own moves are deterministic, so no sampling is involved.
Action willed_action(const GridState& s, int agent, const TargetSet& targets, const SimConfig& config);

using ActionDist = std::array<double, 6>;

// Softmax of -beta * distance over the five movement actions (Idle, Left,
// Right, Up, Down). When `on_goal`, Idle's mass is moved to Hunt.
ActionDist boltzmann_from_distances(std::span<const int, 5> distances, bool on_goal, double beta);

/// Caches exp(-beta * k) for the three distance offsets a single move can produce.
class BoltzmannKernel {
public:
    explicit BoltzmannKernel(double beta);

    ActionDist dist(Position from, Position goal, int height, int width) const noexcept;
    Action sample(Position from, Position goal, int height, int width, Rng& rng) const noexcept;

private:
    std::array<double, 3> weight_{};
};

ActionDist boltzmann_action_dist(const GridState& s, int peer, int goal_prey, double beta,
                                 const SimConfig& config);

/// Posterior over every agent's goal prey. Row j is what any observer believes
/// about agent j; rows do not depend on the observer, so one table serves
/// every planner in an episode (each ignores its own row).
class Belief {
public:
    Belief() = default;
    static Belief uniform(int n_agents, int n_prey);

    int n_agents() const noexcept { return n_agents_; }
    int n_prey() const noexcept { return n_prey_; }
    std::span<const double> row(int agent) const noexcept {
        return {p_.data() + static_cast<std::size_t>(agent) * n_prey_, static_cast<std::size_t>(n_prey_)};
    }
    std::span<double> row(int agent) noexcept {
        return {p_.data() + static_cast<std::size_t>(agent) * n_prey_, static_cast<std::size_t>(n_prey_)};
    }
    // Number of rows reset to uniform after their posterior mass vanished.
    int degenerate_resets() const noexcept { return resets_; }
    void note_reset() noexcept { ++resets_; }

private:
    int n_agents_ = 0;
    int n_prey_ = 0;
    int resets_ = 0;
    std::vector<double> p_;
};

/// One Bayesian step on the observed joint action taken from `prev`. Rows of
/// agents already done in `prev` are left untouched.
Belief update_beliefs(const Belief& belief, const GridState& prev, std::span<const Action> observed,
                      double beta, const SimConfig& config);

/// Zeroes the columns of dead prey and renormalizes every row.
void retire_dead_prey(Belief& belief, const GridState& state);

/// Discounted reward of `agent` in one simulated continuation: the agent
/// descends on `own_goal`, each peer samples Boltzmann moves toward
/// `peer_goals[j]` (-1 for none). Only peers sharing `own_goal` can change the
/// agent's reward, so only they are simulated.
double rollout_value(const GridState& s, int agent, int own_goal, std::span<const int> peer_goals,
                     const SimConfig& config, const RationalParams& params, Rng& rng);

struct RationalChoice {
    Action action = Action::Idle;
    int goal = -1;
    std::vector<double> mean_values;  // per prey index; 0 for non-candidates
};

/// Monte Carlo target selection under sampled peer goals. Throws NoAlivePrey.
RationalChoice rational_action(const GridState& s, int agent, const Belief& belief,
                               const SimConfig& config, const RationalParams& params, Rng& rng);

struct WillClock {
    int committed_steps = 0;
    PreyKind target = PreyKind::Stag;

    static WillClock from_alpha(double alpha, int horizon);
    bool willed_at(int t) const noexcept { return t < committed_steps; }
};

bool replans_at(const EndogenousStrategy& strategy, int t, int horizon);

/// Per-agent state threaded through an episode.
struct AgentMemory {
    std::optional<int> locked_target;
};

struct Decision {
    Action action = Action::Idle;
    int goal = -1;  // prey planned toward, -1 if none
};

Decision act(const AgentSpec& spec, const GridState& s, int agent, const Belief& belief,
             AgentMemory& memory, const SimConfig& config, Rng& rng);

}  // namespace willsim
