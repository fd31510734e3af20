#include "willsim/core.hpp"

#include <cmath>

#include "json.hpp"

#include "willsim/rng.hpp"

namespace willsim {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::ThresholdExceedsAgents: return "ThresholdExceedsAgents";
        case ErrorCode::GridTooSmall: return "GridTooSmall";
        case ErrorCode::NegativeReward: return "NegativeReward";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::UnknownField: return "UnknownField";
        case ErrorCode::EpisodeOver: return "EpisodeOver";
        case ErrorCode::EmptyTargetSet: return "EmptyTargetSet";
        case ErrorCode::NoAlivePrey: return "NoAlivePrey";
        case ErrorCode::EmptyFeasibleRegion: return "EmptyFeasibleRegion";
        case ErrorCode::TippingPointOutsideFeasibleRegion: return "TippingPointOutsideFeasibleRegion";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

void validate_config(const SimConfig& c) {
    if (c.grid_height < 1 || c.grid_width < 1)
        throw Error(ErrorCode::InvalidConfig, "grid dimensions must be positive");
    if (c.n_agents < 1) throw Error(ErrorCode::InvalidConfig, "n_agents must be positive");
    if (c.n_stags < 0 || c.n_hares < 0)
        throw Error(ErrorCode::InvalidConfig, "prey counts must be non-negative");
    if (c.threshold < 1) throw Error(ErrorCode::InvalidConfig, "threshold must be >= 1");
    if (c.horizon < 1) throw Error(ErrorCode::InvalidConfig, "horizon must be >= 1");
    if (c.threshold > c.n_agents)
        throw Error(ErrorCode::ThresholdExceedsAgents,
                    "threshold " + std::to_string(c.threshold) + " > n_agents " +
                        std::to_string(c.n_agents));
    const long long cells = static_cast<long long>(c.grid_height) * c.grid_width;
    if (cells < c.n_stags + c.n_hares)
        throw Error(ErrorCode::GridTooSmall, std::to_string(cells) + " cells for " +
                                                 std::to_string(c.n_prey()) + " prey");
    if (!(c.hare_reward >= 0.0) || !(c.stag_share >= 0.0))
        throw Error(ErrorCode::NegativeReward, "rewards must be >= 0");
}

namespace {

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) {
        try {
            out = it->get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::InvalidConfig, std::string("field '") + key + "': " + e.what());
        }
    }
}

constexpr std::array<const char*, 10> kConfigFields = {
    "grid_height", "grid_width", "n_agents",  "n_stags", "n_hares",
    "hare_reward", "stag_share", "threshold", "horizon", "master_seed"};

}  // namespace

SimConfig config_from_json(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::InvalidConfig, e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (const char* f : kConfigFields) known = known || key == f;
        if (!known) throw Error(ErrorCode::UnknownField, key);
    }
    SimConfig c;
    read_field(j, "grid_height", c.grid_height);
    read_field(j, "grid_width", c.grid_width);
    read_field(j, "n_agents", c.n_agents);
    read_field(j, "n_stags", c.n_stags);
    read_field(j, "n_hares", c.n_hares);
    read_field(j, "hare_reward", c.hare_reward);
    read_field(j, "stag_share", c.stag_share);
    read_field(j, "threshold", c.threshold);
    read_field(j, "horizon", c.horizon);
    read_field(j, "master_seed", c.master_seed);
    return c;
}

std::string config_to_json(const SimConfig& c) {
    nlohmann::ordered_json j;
    j["grid_height"] = c.grid_height;
    j["grid_width"] = c.grid_width;
    j["n_agents"] = c.n_agents;
    j["n_stags"] = c.n_stags;
    j["n_hares"] = c.n_hares;
    j["hare_reward"] = c.hare_reward;
    j["stag_share"] = c.stag_share;
    j["threshold"] = c.threshold;
    j["horizon"] = c.horizon;
    j["master_seed"] = c.master_seed;
    return j.dump(2);
}

std::uint64_t derive_episode_seed(std::uint64_t master_seed, std::uint64_t episode_index) noexcept {
    return mix_pair(master_seed, episode_index);
}

std::string_view to_string(Action a) {
    switch (a) {
        case Action::Idle: return "idle";
        case Action::Left: return "left";
        case Action::Right: return "right";
        case Action::Up: return "up";
        case Action::Down: return "down";
        case Action::Hunt: return "hunt";
    }
    return "?";
}

std::optional<Action> action_from_string(std::string_view name) {
    for (Action a : kAllActions)
        if (to_string(a) == name) return a;
    return std::nullopt;
}

std::string_view to_string(PreyKind k) { return k == PreyKind::Stag ? "stag" : "hare"; }

std::string_view to_string(EndogenousStrategy::Variant v) {
    using V = EndogenousStrategy::Variant;
    switch (v) {
        case V::PureRational: return "pure_rational";
        case V::Intermittent: return "intermittent";
        case V::Phased: return "phased";
        case V::Instant: return "instant";
    }
    return "?";
}

int ceil_tolerant(double x) noexcept { return static_cast<int>(std::ceil(x - 1e-9)); }

}  // namespace willsim
