#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace willsim {

enum class ErrorCode {
    ThresholdExceedsAgents,
    GridTooSmall,
    NegativeReward,
    InvalidConfig,
    UnknownField,
    EpisodeOver,
    EmptyTargetSet,
    NoAlivePrey,
    EmptyFeasibleRegion,
    TippingPointOutsideFeasibleRegion,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Full parameterization of one Markov Stag Hunt setting. The total reward of
/// a captured stag is stag_share * threshold, split among its hunters.
struct SimConfig {
    int grid_height = 20;
    int grid_width = 20;
    int n_agents = 20;
    int n_stags = 3;
    int n_hares = 20;
    double hare_reward = 1.0;
    double stag_share = 5.0;
    int threshold = 3;
    int horizon = 50;
    std::uint64_t master_seed = 0;

    int n_prey() const noexcept { return n_stags + n_hares; }
    double stag_total_reward() const noexcept { return stag_share * threshold; }

    bool operator==(const SimConfig&) const = default;
};

/// Throws Error with the first violated invariant.
void validate_config(const SimConfig& config);

/// Parses a JSON object whose keys are exactly SimConfig's field names.
/// Missing keys keep their defaults; unknown keys are rejected.
SimConfig config_from_json(std::string_view json_text);
std::string config_to_json(const SimConfig& config);

std::uint64_t derive_episode_seed(std::uint64_t master_seed, std::uint64_t episode_index) noexcept;

struct Position {
    int row = 0;
    int col = 0;

    bool operator==(const Position&) const = default;
};

inline int manhattan(Position a, Position b) noexcept {
    const int dr = a.row > b.row ? a.row - b.row : b.row - a.row;
    const int dc = a.col > b.col ? a.col - b.col : b.col - a.col;
    return dr + dc;
}

// Declaration order is the canonical tie-breaking order.
enum class Action : std::uint8_t { Idle = 0, Left, Right, Up, Down, Hunt };

inline constexpr std::array<Action, 6> kAllActions = {Action::Idle, Action::Left, Action::Right,
                                                      Action::Up,   Action::Down, Action::Hunt};
inline constexpr std::array<Action, 5> kMoveActions = {Action::Idle, Action::Left, Action::Right,
                                                       Action::Up, Action::Down};

std::string_view to_string(Action a);
std::optional<Action> action_from_string(std::string_view name);

/// Position after applying a movement action; moves that would leave the grid
/// resolve to staying put. Hunt does not move.
inline Position apply_move(Position p, Action a, int height, int width) noexcept {
    switch (a) {
        case Action::Left:
            if (p.col > 0) --p.col;
            break;
        case Action::Right:
            if (p.col + 1 < width) ++p.col;
            break;
        case Action::Up:
            if (p.row > 0) --p.row;
            break;
        case Action::Down:
            if (p.row + 1 < height) ++p.row;
            break;
        default:
            break;
    }
    return p;
}

enum class PreyKind : std::uint8_t { Stag, Hare };

std::string_view to_string(PreyKind k);

struct RationalParams {
    double beta = 10.0;
    int rollouts = 15;
    double gamma = 0.98;

    bool operator==(const RationalParams&) const = default;
};

struct EndogenousStrategy {
    enum class Variant : std::uint8_t { PureRational, Intermittent, Phased, Instant };

    Variant variant = Variant::PureRational;
    double ratio = 1.0;  // rational ratio k; ignored by PureRational and Instant

    bool operator==(const EndogenousStrategy&) const = default;
};

std::string_view to_string(EndogenousStrategy::Variant v);

namespace mode {
struct Willed {
    PreyKind target = PreyKind::Stag;
    bool operator==(const Willed&) const = default;
};
struct Rational {
    bool operator==(const Rational&) const = default;
};
struct Hybrid {
    double alpha = 0.0;  // will strength in [-1, 1]
    bool operator==(const Hybrid&) const = default;
};
struct Endogenous {
    EndogenousStrategy strategy;
    bool operator==(const Endogenous&) const = default;
};
}  // namespace mode

using AgentMode = std::variant<mode::Willed, mode::Rational, mode::Hybrid, mode::Endogenous>;

struct AgentSpec {
    AgentMode mode = mode::Rational{};
    RationalParams rational;

    static AgentSpec willed(PreyKind k) { return {mode::Willed{k}, {}}; }
    static AgentSpec rational_agent() { return {mode::Rational{}, {}}; }
    static AgentSpec hybrid(double alpha) { return {mode::Hybrid{alpha}, {}}; }
    static AgentSpec endogenous(EndogenousStrategy s) { return {mode::Endogenous{s}, {}}; }

    bool operator==(const AgentSpec&) const = default;
};

// ceil(x) that ignores representation error just above an integer, so that
// 0.3 * 10 gives 3 rather than 4.
int ceil_tolerant(double x) noexcept;

}  // namespace willsim
