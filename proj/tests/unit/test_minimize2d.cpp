#include "doctest.h"

#include "fbpool/errors.hpp"
#include "fbpool/minimize2d.hpp"

#include <cmath>

using namespace fbpool;

namespace {

SolveConfig small_config(double N, double hy, ProfileFn fn = {}) {
    const ProfileParams p(N, 0.1);
    SolveConfig c{p, solver_grid(p, hy, 2 * hy)};
    c.eps_schedule = default_eps_schedule(hy);
    c.profile_fn = std::move(fn);
    return c;
}

double max_abs_diff(const ScalarField2D& a, const ScalarField2D& b) {
    double m = 0;
    for (std::size_t k = 0; k < a.values().size(); ++k)
        m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
    return m;
}

}  // namespace

TEST_SUITE("minimize2d") {

TEST_CASE("solver grid and schedule") {
    const ProfileParams p(5, 0.1);
    const Grid g = solver_grid(p, 1.0 / 64, 1.0 / 32);
    CHECK(g.hy() == doctest::Approx(1.0 / 64));
    CHECK(g.hx() <= 1.0 / 32 + 1e-15);
    CHECK(g.nx() % 2 == 0);
    CHECK(g.rect().x_hi == 15.0);
    const auto s = default_eps_schedule(1.0 / 64);
    CHECK(s.front() == 0.25);
    CHECK(s.back() == doctest::Approx(1.0 / 256));
    for (std::size_t k = 1; k < s.size(); ++k) CHECK(s[k] < s[k - 1]);
}

TEST_CASE("slice field examples") {
    const ProfileParams p(4, 0.1);
    const Grid g(p.domain(), 480, 40);
    const auto v = slice_field(p, g);
    CHECK(v(g.node_i(0), g.node_j(1)) == doctest::Approx(0.9));
    CHECK(v(g.node_i(2.5 * 4), g.node_j(0.5)) == doctest::Approx(1.0));
    CHECK(v(g.node_i(0), g.node_j(0.05)) == 0.0);
    for (int j = 0; j <= g.ny(); ++j) CHECK(v(0, j) == doctest::Approx(2 * g.y(j)));
}

TEST_CASE("constant data f = 2 returns 2y") {
    auto cfg = small_config(1, 1.0 / 16, [](double) { return 2.0; });
    const auto r = solve(cfg);
    CHECK(r.converged);
    const auto lin = sample(r.u.grid(), [](double, double y) { return 2 * y; });
    CHECK(max_abs_diff(r.u, lin) <= 1e-6);
    CHECK(std::abs(r.final_energy.total - 60.0) <= 0.1);
}

TEST_CASE("constant data f = 0.9 returns the x-independent profile away from the sides") {
    // Side data is y*f, not the zero-band profile; away from the sides only O(h) jitter of the band edge remains.
    auto cfg = small_config(2, 1.0 / 32, [](double) { return 0.9; });
    const auto r = solve(cfg);
    CHECK(r.converged);
    const Grid& g = r.u.grid();
    const double interior = energy_J(r.u, Weights::unit(), Rect(-2, 2, -1, 1), r.zero_tol).total;
    CHECK(std::abs(interior - 3.6 * 4) <= 4 * 4 * g.hy());
    const int ic = g.nx() / 2;
    double spread = 0;
    for (int j = 0; j <= g.ny(); ++j)
        for (int i = g.node_i(-2); i <= g.node_i(2); ++i)
            spread = std::max(spread, std::abs(r.u(i, j) - r.u(ic, j)));
    CHECK(spread <= g.hy());
    for (int j = 0; j <= g.ny(); ++j) {
        const double y = g.y(j);
        if (std::abs(y) < 0.1 - g.hy()) CHECK(std::abs(r.u(ic, j)) <= 1e-12);
        if (std::abs(y) > 0.1 + 2 * g.hy()) CHECK(std::abs(r.u(ic, j)) > 0);
    }
}

TEST_CASE("full profile: odd symmetry, monotone history, derivative bound") {
    auto cfg = small_config(2, 1.0 / 32);
    const auto r = solve(cfg);
    CHECK(r.converged);
    CHECK(r.odd_symmetric);
    const Grid& g = r.u.grid();
    for (int j = 0; j <= g.ny(); ++j)
        for (int i = 0; i <= g.nx(); ++i) CHECK(std::abs(r.u(i, j) + r.u(i, g.ny() - j)) <= 1e-8);
    REQUIRE(r.energy_history.size() == r.history_stage.size());
    for (std::size_t k = 1; k < r.energy_history.size(); ++k)
        if (r.history_stage[k] == r.history_stage[k - 1])
            CHECK(r.energy_history[k] <=
                  r.energy_history[k - 1] + cfg.rel_tol * std::abs(r.energy_history[k - 1]));
    CHECK(dx_energy(r.u, g.rect()) <= 16 / 2.0);
    // No worse than the initializer.
    const double zt = r.zero_tol;
    CHECK(r.final_energy.total <= energy_J(r.initial, Weights::unit(), zt).total + 1e-9);

    const auto audit = competitor_audit(r, Weights::unit(), 24, 3);
    CHECK(audit.passed);
    CHECK(audit.violations == 0);
    for (const auto& e : audit.entries)
        if (e.competitor == "harmonic_replacement") CHECK(e.margin >= -e.tol);
}

TEST_CASE("configuration errors") {
    auto cfg = small_config(1, 1.0 / 16);
    auto bad = cfg;
    bad.eps_schedule.clear();
    CHECK_THROWS_AS(solve(bad), DomainError);
    bad = cfg;
    bad.eps_schedule = {0.1, 0.2};
    CHECK_THROWS_AS(solve(bad), DomainError);
    bad = cfg;
    bad.eps_schedule = {0.1, 1e-3};
    CHECK_THROWS_AS(solve(bad), DomainError);
    bad = cfg;
    bad.rel_tol = 0;
    CHECK_THROWS_AS(solve(bad), DomainError);
    CHECK_THROWS_AS(solver_grid(ProfileParams(1, 0.1), 0, 0.1), DomainError);
}

TEST_CASE("discrete harmonic functions are fixed by harmonic replacement") {
    const Grid g(Rect(-1, 1, -1, 1), 40, 40);
    const auto u = sample(g, [](double x, double y) { return x * x - y * y + 0.5 * x * y; });
    const BallStencil st = ball_stencil(g, {{0.1, -0.2}, 0.5});
    REQUIRE_FALSE(st.nodes.empty());
    const auto h = harmonic_in_ball(u, st);
    for (std::size_t a : st.nodes) CHECK(std::abs(h[a] - u.values()[a]) <= 1e-10);
    // A non-harmonic bump is strictly lowered in Dirichlet energy.
    const auto b = sample(g, [](double x, double y) { return std::exp(-4 * (x * x + y * y)); });
    const auto hb = harmonic_in_ball(b, st);
    const Weights w = Weights::unit();
    CHECK(energy_on_cells(g, hb.data(), w, st.cells, -1) <
          energy_on_cells(g, b.data(), w, st.cells, -1));
}

TEST_CASE("ball stencil stays strictly inside") {
    const Grid g(Rect(0, 1, 0, 1), 20, 20);
    const BallStencil st = ball_stencil(g, {{0.5, 0.5}, 0.2});
    for (std::size_t a : st.nodes) {
        const int i = int(a % 21), j = int(a / 21);
        CHECK(std::hypot(g.x(i) - 0.5, g.y(j) - 0.5) < 0.2);
    }
}

TEST_CASE("smoothed energy saturates at the sharp area") {
    const Grid g(Rect(0, 1, 0, 1), 8, 8);
    const auto c = sample(g, [](double, double) { return 3.0; });
    CHECK(smoothed_energy(c, 0.5) == doctest::Approx(1.0));
    const auto s = sample(g, [](double, double) { return 0.1; });
    CHECK(smoothed_energy(s, 0.5) == doctest::Approx(0.2));
}

}
