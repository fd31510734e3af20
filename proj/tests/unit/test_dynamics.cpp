#include <cmath>

#include "doctest.h"
#include "willsim/core.hpp"
#include "willsim/dynamics.hpp"

using namespace willsim;
using namespace willsim::dynamics;

namespace {

// Trapezoid rule with many panels; exact for linear integrands up to rounding.
double trapezoid(const PopulationGame& g, double a, double b, int n = 100000) {
    const double h = (b - a) / n;
    double s = 0.5 * (payoff_differential(g, a) + payoff_differential(g, b));
    for (int i = 1; i < n; ++i) s += payoff_differential(g, a + i * h);
    return s * h;
}

}  // namespace

TEST_CASE("default games satisfy their orderings") {
    for (auto k : {GameKind::StagHunt, GameKind::Snowdrift, GameKind::PrisonersDilemma})
        CHECK_NOTHROW(validate_game(PopulationGame::defaults(k)));
    CHECK_THROWS_AS(validate_game(PopulationGame::stag_hunt(2, 0, 3, 3)), Error);
    CHECK_THROWS_AS(validate_game(PopulationGame::snowdrift(3, 0, 4, 1)), Error);
    CHECK_THROWS_AS(validate_game(PopulationGame::prisoners_dilemma(6, 0, 5, 1)), Error);
}

TEST_CASE("payoff_differential") {
    const auto sh = PopulationGame::stag_hunt();
    const auto sd = PopulationGame::snowdrift();
    const auto pd = PopulationGame::prisoners_dilemma();
    for (double x = 0; x <= 1.0; x += 0.125) {
        CHECK(payoff_differential(sh, x) == doctest::Approx(4 * x - 3));
        CHECK(payoff_differential(sd, x) == doctest::Approx(2 - 3 * x));
        CHECK(payoff_differential(pd, x) == doctest::Approx(-x - 1));
        CHECK(payoff_differential(pd, x) < 0);
    }
    CHECK(payoff_differential(sh, 0.75) == 0.0);
    CHECK(payoff_differential(sd, 2.0 / 3.0) == doctest::Approx(0.0));
}

TEST_CASE("find_equilibria") {
    const auto sh = PopulationGame::stag_hunt();
    SUBCASE("stag hunt without willed agents") {
        const auto eq = find_equilibria(sh, {0, 0});
        REQUIRE(eq.size() == 3);
        CHECK(eq[0].x_star == 0.0);
        CHECK(eq[0].classification == Stability::LowerBoundaryStable);
        CHECK(eq[1].x_star == doctest::Approx(0.75));
        CHECK(eq[1].classification == Stability::InteriorUnstable);
        CHECK(eq[2].x_star == 1.0);
        CHECK(eq[2].classification == Stability::UpperBoundaryStable);
    }
    SUBCASE("n1 above the tipping point leaves only coordination") {
        const auto eq = find_equilibria(sh, {0.8, 0});
        REQUIRE(eq.size() == 1);
        CHECK(eq[0].x_star == 1.0);
        CHECK(eq[0].classification == Stability::UpperBoundaryStable);
    }
    SUBCASE("snowdrift over-cooperation") {
        const auto eq = find_equilibria(PopulationGame::snowdrift(), {0.8, 0});
        REQUIRE(eq.size() == 1);
        CHECK(eq[0].x_star == 0.8);
        CHECK(eq[0].classification == Stability::LowerBoundaryStable);
        CHECK(payoff_differential(PopulationGame::snowdrift(), 0.8) == doctest::Approx(-0.4));
    }
    SUBCASE("snowdrift interior") {
        const auto eq = find_equilibria(PopulationGame::snowdrift(), {0.1, 0.1});
        REQUIRE(eq.size() == 1);
        CHECK(eq[0].x_star == doctest::Approx(2.0 / 3.0));
        CHECK(eq[0].classification == Stability::InteriorStable);
    }
    SUBCASE("prisoner's dilemma floor") {
        const auto eq = find_equilibria(PopulationGame::prisoners_dilemma(), {0.3, 0.4});
        REQUIRE(eq.size() == 1);
        CHECK(eq[0].x_star == 0.3);
    }
    SUBCASE("empty feasible region") {
        try {
            (void)find_equilibria(sh, {0.7, 0.4});
            FAIL("accepted n1 + n2 > 1");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::EmptyFeasibleRegion);
        }
    }
    SUBCASE("degenerate single-point region") {
        const auto eq = find_equilibria(sh, {0.5, 0.5});
        REQUIRE(eq.size() == 1);
        CHECK(eq[0].x_star == 0.5);
    }
}

TEST_CASE("integrate_sde") {
    const auto sh = PopulationGame::stag_hunt();
    Rng rng(1);
    SUBCASE("deterministic flow converges monotonically to 1") {
        SDEParams p;
        p.t_max = 20;
        const auto path = integrate_sde(sh, {0, 0}, p, 0.8, rng, 100);
        for (std::size_t i = 1; i < path.size(); ++i) CHECK(path[i] >= path[i - 1]);
        CHECK(std::abs(path.back() - 1.0) < 1e-3);
    }
    SUBCASE("fixed point stays put") {
        SDEParams p;
        p.t_max = 5;
        const auto path = integrate_sde(PopulationGame::snowdrift(), {0, 0}, p, 2.0 / 3.0, rng, 50);
        for (double x : path) CHECK(x == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("noisy path stays inside Omega") {
        SDEParams p;
        p.sigma = 0.5;
        p.t_max = 20;
        const WillShares w{0.2, 0.3};
        const auto path = integrate_sde(sh, w, p, 0.4, rng);
        for (double x : path) {
            CHECK(x >= 0.2);
            CHECK(x <= 0.7);
        }
    }
    SUBCASE("x0 outside Omega is rejected") {
        CHECK_THROWS_AS(integrate_sde(sh, {0.2, 0}, SDEParams{}, 0.1, rng), Error);
    }
}

TEST_CASE("settle agrees with an ODE oracle") {
    // dx/dt = m (4x - 3) has solution x(t) = 0.75 + (x0 - 0.75) e^{4 m t}.
    const auto sh = PopulationGame::stag_hunt();
    SDEParams p;
    p.dt = 1e-4;
    p.t_max = 0.1;
    const double x0 = 0.8;
    const auto s = settle(sh, {0, 0}, p, x0, 0.0);
    const double exact = 0.75 + (x0 - 0.75) * std::exp(4 * 0.1);
    CHECK(s.x == doctest::Approx(exact).epsilon(1e-3));
}

TEST_CASE("barrier_integral") {
    const auto sh = PopulationGame::stag_hunt();
    CHECK(barrier_integral(sh, {0, 0}) == doctest::Approx(-1.125));
    CHECK(barrier_integral(sh, {0.5, 0}) == doctest::Approx(-0.125));
    CHECK(barrier_integral(sh, {0.75, 0}) == doctest::Approx(0.0));
    for (double n1 : {0.0, 0.2, 0.4, 0.6})
        CHECK(barrier_integral(sh, {n1, 0}) == doctest::Approx(trapezoid(sh, n1, 0.75)).epsilon(1e-8));
    try {
        (void)barrier_integral(sh, {0.8, 0});
        FAIL("tip outside Omega accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TippingPointOutsideFeasibleRegion);
    }
    CHECK_THROWS_AS(barrier_integral(PopulationGame::prisoners_dilemma(), {0, 0}), Error);
}

TEST_CASE("escape_time") {
    const auto sh = PopulationGame::stag_hunt();
    SDEParams p;
    p.sigma = 0.3;
    p.dt = 1e-3;
    p.t_max = 200;
    SUBCASE("starting at the tip takes no time") {
        const auto st = escape_time(sh, {0.75, 0}, p, 10, 1);
        CHECK(st.mean_tau == 0.0);
        CHECK(st.censored_fraction == 0.0);
    }
    SUBCASE("raising n1 shortens the escape") {
        const auto low = escape_time(sh, {0.5, 0}, p, 200, 7);
        const auto high = escape_time(sh, {0.65, 0}, p, 200, 7);
        CHECK(high.mean_tau < low.mean_tau);
        CHECK(low.ci95 > 0);
    }
    SUBCASE("more noise escapes sooner") {
        SDEParams loud = p;
        loud.sigma = 0.6;
        const auto quiet = escape_time(sh, {0.5, 0}, p, 200, 7);
        const auto noisy = escape_time(sh, {0.5, 0}, loud, 200, 7);
        CHECK(noisy.mean_tau < quiet.mean_tau);
    }
    SUBCASE("censoring is reported") {
        SDEParams tiny = p;
        tiny.sigma = 0.05;
        tiny.t_max = 1;
        const auto st = escape_time(sh, {0.0, 0}, tiny, 20, 3);
        CHECK(st.censored_fraction == 1.0);
        CHECK(st.mean_tau == doctest::Approx(1.0));
    }
    SUBCASE("reproducible") {
        const auto a = escape_time(sh, {0.6, 0}, p, 50, 11);
        const auto b = escape_time(sh, {0.6, 0}, p, 50, 11);
        CHECK(a.mean_tau == b.mean_tau);
    }
}
