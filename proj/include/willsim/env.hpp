#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "willsim/core.hpp"
#include "willsim/rng.hpp"

namespace willsim {

struct Prey {
    PreyKind kind = PreyKind::Hare;
    Position pos;
    bool alive = true;

    bool operator==(const Prey&) const = default;
};

/// Snapshot of one Markov Stag Hunt episode. Prey are ordered stags first,
/// then hares, and dead prey stay in the list.
struct GridState {
    int t = 0;
    std::vector<Position> agent_pos;
    std::vector<std::uint8_t> agent_done;
    std::vector<Prey> prey;

    int n_agents() const noexcept { return static_cast<int>(agent_pos.size()); }
    int n_prey() const noexcept { return static_cast<int>(prey.size()); }
    bool done(int agent) const noexcept { return agent_done[static_cast<std::size_t>(agent)] != 0; }
    int alive_count(PreyKind kind) const noexcept;
    // Index of the prey occupying `p`, or -1.
    int prey_at(Position p) const noexcept;

    bool operator==(const GridState&) const = default;
};

struct HuntEvent {
    int prey_index = -1;
    std::vector<int> hunters;

    bool operator==(const HuntEvent&) const = default;
};

struct StepOutcome {
    std::vector<double> rewards;
    std::vector<HuntEvent> hunt_events;
};

GridState reset(const SimConfig& config, Rng& rng);

/// Advances the episode by one synchronous step. `rng` is only drawn from to
/// break ties between several agents hunting the same hare.
std::pair<GridState, StepOutcome> step(const GridState& state, std::span<const Action> joint_action,
                                       const SimConfig& config, Rng& rng);

/// Largest achievable episode total: staff s stags with threshold agents each
/// and let the remaining agents take hares, maximized over s.
double max_group_payoff(const SimConfig& config) noexcept;

double normalized_group_payoff(double total_reward, const SimConfig& config) noexcept;

/// One JSON-lines record of an episode trace. `chosen_goals` holds the goal
/// prey each agent planned toward this step (-1 when none).
std::string trace_record(int t, std::span<const Action> joint_action, const StepOutcome& outcome,
                         std::span<const int> chosen_goals);

}  // namespace willsim
