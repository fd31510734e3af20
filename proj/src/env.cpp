#include "willsim/env.hpp"

#include <algorithm>
#include <numeric>

#include "json.hpp"

namespace willsim {

int GridState::alive_count(PreyKind kind) const noexcept {
    int n = 0;
    for (const auto& p : prey) n += (p.alive && p.kind == kind) ? 1 : 0;
    return n;
}

int GridState::prey_at(Position p) const noexcept {
    for (std::size_t i = 0; i < prey.size(); ++i)
        if (prey[i].pos == p) return static_cast<int>(i);
    return -1;
}

GridState reset(const SimConfig& config, Rng& rng) {
    GridState s;
    const int cells = config.grid_height * config.grid_width;
    const int n_prey = config.n_prey();

    // Partial Fisher-Yates over cell indices for distinct prey cells.
    std::vector<int> cell(static_cast<std::size_t>(cells));
    std::iota(cell.begin(), cell.end(), 0);
    s.prey.reserve(static_cast<std::size_t>(n_prey));
    for (int i = 0; i < n_prey; ++i) {
        const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(cells - i)));
        std::swap(cell[static_cast<std::size_t>(i)], cell[static_cast<std::size_t>(j)]);
        const int c = cell[static_cast<std::size_t>(i)];
        s.prey.push_back({i < config.n_stags ? PreyKind::Stag : PreyKind::Hare,
                          {c / config.grid_width, c % config.grid_width},
                          true});
    }

    s.agent_pos.reserve(static_cast<std::size_t>(config.n_agents));
    for (int i = 0; i < config.n_agents; ++i) {
        const auto c = static_cast<int>(rng.below(static_cast<std::uint64_t>(cells)));
        s.agent_pos.push_back({c / config.grid_width, c % config.grid_width});
    }
    s.agent_done.assign(static_cast<std::size_t>(config.n_agents), 0);
    return s;
}

std::pair<GridState, StepOutcome> step(const GridState& state, std::span<const Action> joint_action,
                                       const SimConfig& config, Rng& rng) {
    if (state.t >= config.horizon)
        throw Error(ErrorCode::EpisodeOver, "step at t=" + std::to_string(state.t));
    const int n = state.n_agents();
    if (static_cast<int>(joint_action.size()) != n)
        throw Error(ErrorCode::InvalidArgument, "joint action size mismatch");

    GridState next = state;
    StepOutcome out;
    out.rewards.assign(static_cast<std::size_t>(n), 0.0);

    std::vector<std::vector<int>> hunters(state.prey.size());
    for (int i = 0; i < n; ++i) {
        if (state.done(i)) continue;
        const Action a = joint_action[static_cast<std::size_t>(i)];
        auto& pos = next.agent_pos[static_cast<std::size_t>(i)];
        pos = apply_move(pos, a, config.grid_height, config.grid_width);
        if (a != Action::Hunt) continue;
        const int g = state.prey_at(pos);
        if (g >= 0 && state.prey[static_cast<std::size_t>(g)].alive)
            hunters[static_cast<std::size_t>(g)].push_back(i);
    }

    for (std::size_t g = 0; g < hunters.size(); ++g) {
        auto& hs = hunters[g];
        if (hs.empty()) continue;
        if (state.prey[g].kind == PreyKind::Hare) {
            int winner = hs.front();
            if (hs.size() > 1) winner = hs[static_cast<std::size_t>(rng.below(hs.size()))];
            out.rewards[static_cast<std::size_t>(winner)] = config.hare_reward;
            next.agent_done[static_cast<std::size_t>(winner)] = 1;
            next.prey[g].alive = false;
            out.hunt_events.push_back({static_cast<int>(g), {winner}});
        } else if (static_cast<int>(hs.size()) >= config.threshold) {
            const double share = config.stag_total_reward() / static_cast<double>(hs.size());
            for (int i : hs) {
                out.rewards[static_cast<std::size_t>(i)] = share;
                next.agent_done[static_cast<std::size_t>(i)] = 1;
            }
            next.prey[g].alive = false;
            out.hunt_events.push_back({static_cast<int>(g), hs});
        }
    }

    ++next.t;
    return {std::move(next), std::move(out)};
}

double max_group_payoff(const SimConfig& c) noexcept {
    const int staffable = std::min(c.n_stags, c.n_agents / c.threshold);
    double best = 0.0;
    for (int s = 0; s <= staffable; ++s) {
        const int spare = c.n_agents - s * c.threshold;
        const double total = s * c.stag_total_reward() + std::min(spare, c.n_hares) * c.hare_reward;
        best = std::max(best, total);
    }
    return best;
}

double normalized_group_payoff(double total_reward, const SimConfig& config) noexcept {
    const double p_max = max_group_payoff(config);
    if (p_max <= 0.0) return 0.0;
    return std::clamp(total_reward / p_max, 0.0, 1.0);
}

std::string trace_record(int t, std::span<const Action> joint_action, const StepOutcome& outcome,
                         std::span<const int> chosen_goals) {
    nlohmann::ordered_json j;
    j["t"] = t;
    auto& actions = j["joint_action"] = nlohmann::json::array();
    for (Action a : joint_action) actions.push_back(std::string(to_string(a)));
    j["rewards"] = outcome.rewards;
    auto& events = j["hunt_events"] = nlohmann::json::array();
    for (const auto& e : outcome.hunt_events)
        events.push_back({{"prey_index", e.prey_index}, {"hunters", e.hunters}});
    j["chosen_goals"] = std::vector<int>(chosen_goals.begin(), chosen_goals.end());
    return j.dump();
}

}  // namespace willsim
