#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "willsim/rng.hpp"

namespace willsim::dynamics {

enum class GameKind { StagHunt, Snowdrift, PrisonersDilemma };

std::string_view to_string(GameKind k);

/// Two-strategy matrix game under random matching. With x the share
/// pursuing cooperation, f1(x) = r_cc x + s_cd (1-x) and f2(x) = t_dc x + p_dd (1-x).
struct PopulationGame {
    GameKind kind = GameKind::StagHunt;
    double r_cc = 4.0;
    double s_cd = 0.0;
    double t_dc = 3.0;
    double p_dd = 3.0;

    static PopulationGame stag_hunt(double r = 4, double s = 0, double t = 3, double p = 3);
    static PopulationGame snowdrift(double r = 3, double s = 2, double t = 4, double p = 0);
    static PopulationGame prisoners_dilemma(double r = 3, double s = 0, double t = 5, double p = 1);
    static PopulationGame defaults(GameKind k);

    double f1(double x) const noexcept { return r_cc * x + s_cd * (1.0 - x); }
    double f2(double x) const noexcept { return t_dc * x + p_dd * (1.0 - x); }
    // d(delta f)/dx, constant for matrix games.
    double slope() const noexcept { return r_cc - s_cd - t_dc + p_dd; }
};

/// Throws InvalidArgument when the payoffs violate the ordering of `kind`.
void validate_game(const PopulationGame& game);

/// Willed cooperator and defector fractions. The state is confined to
/// Omega = [n1, 1 - n2].
struct WillShares {
    double n1 = 0.0;
    double n2 = 0.0;

    double rational() const noexcept { return 1.0 - n1 - n2; }
    double lower() const noexcept { return n1; }
    double upper() const noexcept { return 1.0 - n2; }
};

struct SDEParams {
    double move_rate = 1.0;
    double sigma = 0.0;
    double dt = 1e-3;
    double t_max = 1e4;
};

enum class Stability { InteriorStable, InteriorUnstable, LowerBoundaryStable, UpperBoundaryStable };

std::string_view to_string(Stability s);

struct Equilibrium {
    double x_star = 0.0;
    Stability classification = Stability::InteriorStable;

    bool stable() const noexcept { return classification != Stability::InteriorUnstable; }
};

double payoff_differential(const PopulationGame& game, double x);

/// Equilibria in Omega, ordered by position. Interior roots are reported
/// whether stable or not; boundaries only when the gradient pushes into them.
std::vector<Equilibrium> find_equilibria(const PopulationGame& game, const WillShares& shares,
                                         double tol = 1e-12);

/// Euler-Maruyama path of dx = move_rate * m * delta_f(x) dt + sigma dW,
/// clamped to Omega. Every `stride`-th sample is kept, plus the final one.
std::vector<double> integrate_sde(const PopulationGame& game, const WillShares& shares,
                                  const SDEParams& params, double x0, Rng& rng, std::size_t stride = 1);

struct Settled {
    double x = 0.0;
    double last_increment = 0.0;
    double time = 0.0;
};

/// Deterministic (sigma = 0) flow from x0 until a step moves x by at most
/// `step_tol` or t_max elapses.
Settled settle(const PopulationGame& game, const WillShares& shares, const SDEParams& params, double x0,
               double step_tol = 1e-13);

/// Unstable interior root of delta f, if the game has one.
std::optional<double> tipping_point(const PopulationGame& game);

struct EscapeStats {
    double mean_tau = 0.0;
    double ci95 = 0.0;
    double censored_fraction = 0.0;
    int trials = 0;
};

/// First-passage time from n1 up to the tipping point over `trials` seeded
/// paths; paths still below it at t_max count as t_max and are reported as
/// censored. Trial i draws from the stream mix_pair(seed, i), so results do
/// not depend on `parallelism`.
EscapeStats escape_time(const PopulationGame& game, const WillShares& shares, const SDEParams& params,
                        int trials, std::uint64_t seed, int parallelism = 1);

/// Integral of delta f from n1 to the tipping point.
double barrier_integral(const PopulationGame& game, const WillShares& shares);

}  // namespace willsim::dynamics
