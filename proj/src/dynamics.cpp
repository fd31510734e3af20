#include "willsim/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <thread>

#include "willsim/core.hpp"

namespace willsim::dynamics {

std::string_view to_string(GameKind k) {
    switch (k) {
        case GameKind::StagHunt: return "stag_hunt";
        case GameKind::Snowdrift: return "snowdrift";
        case GameKind::PrisonersDilemma: return "prisoners_dilemma";
    }
    return "?";
}

std::string_view to_string(Stability s) {
    switch (s) {
        case Stability::InteriorStable: return "interior_stable";
        case Stability::InteriorUnstable: return "interior_unstable";
        case Stability::LowerBoundaryStable: return "lower_boundary_stable";
        case Stability::UpperBoundaryStable: return "upper_boundary_stable";
    }
    return "?";
}

PopulationGame PopulationGame::stag_hunt(double r, double s, double t, double p) {
    return {GameKind::StagHunt, r, s, t, p};
}
PopulationGame PopulationGame::snowdrift(double r, double s, double t, double p) {
    return {GameKind::Snowdrift, r, s, t, p};
}
PopulationGame PopulationGame::prisoners_dilemma(double r, double s, double t, double p) {
    return {GameKind::PrisonersDilemma, r, s, t, p};
}
PopulationGame PopulationGame::defaults(GameKind k) {
    switch (k) {
        case GameKind::StagHunt: return stag_hunt();
        case GameKind::Snowdrift: return snowdrift();
        case GameKind::PrisonersDilemma: return prisoners_dilemma();
    }
    return stag_hunt();
}

void validate_game(const PopulationGame& g) {
    bool ok = false;
    switch (g.kind) {
        case GameKind::StagHunt: ok = g.r_cc > g.t_dc && g.t_dc >= g.p_dd && g.p_dd > g.s_cd; break;
        case GameKind::Snowdrift: ok = g.t_dc > g.r_cc && g.s_cd > g.p_dd; break;
        case GameKind::PrisonersDilemma: ok = g.t_dc > g.r_cc && g.p_dd > g.s_cd; break;
    }
    if (!ok) throw Error(ErrorCode::InvalidArgument, std::string("payoffs do not form a ") + std::string(to_string(g.kind)));
}

double payoff_differential(const PopulationGame& game, double x) { return game.f1(x) - game.f2(x); }

namespace {

void require_feasible(const WillShares& s) {
    if (s.n1 < 0.0 || s.n2 < 0.0 || s.n1 + s.n2 > 1.0 + 1e-12)
        throw Error(ErrorCode::EmptyFeasibleRegion, "n1 + n2 > 1");
}

}  // namespace

std::vector<Equilibrium> find_equilibria(const PopulationGame& game, const WillShares& shares, double tol) {
    require_feasible(shares);
    const double lo = shares.lower();
    const double hi = std::max(lo, shares.upper());
    std::vector<Equilibrium> out;

    if (hi - lo <= tol) {
        // Omega is a single point; nothing can move.
        out.push_back({lo, payoff_differential(game, lo) > 0.0 ? Stability::UpperBoundaryStable
                                                                : Stability::LowerBoundaryStable});
        return out;
    }
    if (payoff_differential(game, lo) < 0.0) out.push_back({lo, Stability::LowerBoundaryStable});
    const double a = game.slope();
    if (a != 0.0) {
        const double root = -(game.s_cd - game.p_dd) / a;
        if (root > lo + tol && root < hi - tol)
            out.push_back({root, a < 0.0 ? Stability::InteriorStable : Stability::InteriorUnstable});
    }
    if (payoff_differential(game, hi) > 0.0) out.push_back({hi, Stability::UpperBoundaryStable});
    return out;
}

std::vector<double> integrate_sde(const PopulationGame& game, const WillShares& shares,
                                  const SDEParams& params, double x0, Rng& rng, std::size_t stride) {
    require_feasible(shares);
    const double lo = shares.lower(), hi = shares.upper();
    if (x0 < lo || x0 > hi) throw Error(ErrorCode::InvalidArgument, "x0 outside the feasible region");
    if (stride == 0) stride = 1;
    const double drift_scale = params.move_rate * shares.rational() * params.dt;
    const double noise_scale = params.sigma * std::sqrt(params.dt);
    const auto steps = static_cast<std::size_t>(std::llround(params.t_max / params.dt));

    std::vector<double> path;
    path.reserve(steps / stride + 2);
    path.push_back(x0);
    double x = x0;
    for (std::size_t i = 1; i <= steps; ++i) {
        double next = x + drift_scale * payoff_differential(game, x);
        if (noise_scale > 0.0) next += noise_scale * rng.normal();
        x = std::clamp(next, lo, hi);
        if (i % stride == 0 || i == steps) path.push_back(x);
    }
    return path;
}

Settled settle(const PopulationGame& game, const WillShares& shares, const SDEParams& params, double x0,
               double step_tol) {
    require_feasible(shares);
    const double lo = shares.lower(), hi = std::max(lo, shares.upper());
    const double drift_scale = params.move_rate * shares.rational() * params.dt;
    const auto steps = static_cast<std::size_t>(std::llround(params.t_max / params.dt));
    Settled s{std::clamp(x0, lo, hi), 0.0, 0.0};
    for (std::size_t i = 1; i <= steps; ++i) {
        const double next = std::clamp(s.x + drift_scale * payoff_differential(game, s.x), lo, hi);
        s.last_increment = std::abs(next - s.x);
        s.x = next;
        s.time = static_cast<double>(i) * params.dt;
        if (s.last_increment <= step_tol) break;
    }
    return s;
}

std::optional<double> tipping_point(const PopulationGame& game) {
    const double a = game.slope();
    if (a <= 0.0) return std::nullopt;
    const double root = -(game.s_cd - game.p_dd) / a;
    if (root < 0.0 || root > 1.0) return std::nullopt;
    return root;
}

namespace {

double require_tip_in_omega(const PopulationGame& game, const WillShares& shares) {
    require_feasible(shares);
    const auto tip = tipping_point(game);
    if (!tip || *tip < shares.lower() || *tip > shares.upper())
        throw Error(ErrorCode::TippingPointOutsideFeasibleRegion, "no tipping point in [n1, 1 - n2]");
    return *tip;
}

}  // namespace

EscapeStats escape_time(const PopulationGame& game, const WillShares& shares, const SDEParams& params,
                        int trials, std::uint64_t seed, int parallelism) {
    const double tip = require_tip_in_omega(game, shares);
    if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
    const double lo = shares.lower(), hi = shares.upper();
    const double drift_scale = params.move_rate * shares.rational() * params.dt;
    const double noise_scale = params.sigma * std::sqrt(params.dt);
    const auto steps = static_cast<std::size_t>(std::llround(params.t_max / params.dt));

    std::vector<double> taus(static_cast<std::size_t>(trials));
    std::vector<std::uint8_t> hit(static_cast<std::size_t>(trials), 1);
    auto run_trial = [&](int k) {
        double x = lo;
        std::size_t i = 0;
        if (x < tip) {
            Rng rng(mix_pair(seed, static_cast<std::uint64_t>(k)));
            while (i < steps && x < tip) {
                x = std::clamp(x + drift_scale * payoff_differential(game, x) + noise_scale * rng.normal(), lo, hi);
                ++i;
            }
            hit[static_cast<std::size_t>(k)] = x >= tip;
        }
        taus[static_cast<std::size_t>(k)] = static_cast<double>(i) * params.dt;
    };
    const int workers = std::clamp(parallelism, 1, trials);
    if (workers == 1) {
        for (int k = 0; k < trials; ++k) run_trial(k);
    } else {
        std::atomic<int> next{0};
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int k; (k = next.fetch_add(1)) < trials;) run_trial(k);
            });
    }
    int censored = 0;
    for (auto h : hit) censored += h ? 0 : 1;

    EscapeStats st;
    st.trials = trials;
    double sum = 0.0;
    for (double t : taus) sum += t;
    st.mean_tau = sum / trials;
    if (trials > 1) {
        double ss = 0.0;
        for (double t : taus) ss += (t - st.mean_tau) * (t - st.mean_tau);
        st.ci95 = 1.96 * std::sqrt(ss / (trials - 1)) / std::sqrt(static_cast<double>(trials));
    }
    st.censored_fraction = static_cast<double>(censored) / trials;
    return st;
}

double barrier_integral(const PopulationGame& game, const WillShares& shares) {
    const double tip = require_tip_in_omega(game, shares);
    // Antiderivative of a x + b.
    const double a = game.slope(), b = game.s_cd - game.p_dd;
    const auto F = [&](double x) { return 0.5 * a * x * x + b * x; };
    return F(tip) - F(shares.lower());
}

}  // namespace willsim::dynamics
