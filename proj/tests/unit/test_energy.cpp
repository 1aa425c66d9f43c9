#include "doctest.h"

#include "fbpool/boundary.hpp"
#include "fbpool/energy.hpp"
#include "fbpool/errors.hpp"
#include "fbpool/minimize2d.hpp"
#include "fbpool/slice1d.hpp"

#include <cmath>
#include <random>

using namespace fbpool;

namespace {

const double kPi = std::acos(-1.0);

// Random smooth field: a few low Fourier modes plus an affine part.
ScalarField2D random_field(const Grid& g, std::mt19937_64& rng) {
    std::normal_distribution<double> Z;
    double c[8];
    for (double& x : c) x = Z(rng);
    return sample(g, [&](double x, double y) {
        return c[0] * y + c[1] * x * 0.3 + c[2] * std::sin(1.3 * x + c[3]) * std::cos(2.1 * y) +
               c[4] * std::sin(3 * y + c[5] * x) + 0.2 * c[6] * std::cos(c[7] * x * y);
    });
}

}  // namespace

TEST_SUITE("energy") {

TEST_CASE("J examples") {
    const Grid g(Rect(0, 1, -1, 1), 16, 32);
    const auto u = sample(g, [](double, double y) { return 2 * y; });
    const auto r = energy_J(u, Weights::unit(), 0.0);
    CHECK(r.dirichlet == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(r.area_plus + r.area_minus == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.total == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(r.sliced_total == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(std::abs(r.dx_part) <= 1e-12);

    const auto z = sample(g, [](double, double) { return 0.0; });
    CHECK(energy_J(z, Weights::unit(), 0.0).total == 0.0);

    const auto s = slice_minimize(0.9);
    const Grid gf(Rect(0, 1, -1, 1), 8, 640);
    const auto v = sample(gf, [&](double, double y) { return s.eval(y); });
    CHECK(std::abs(energy_J(v, Weights::unit(), 0.0).total - 3.6) <= 2 * gf.hy());
}

TEST_CASE("weighted areas") {
    const Grid g(Rect(0, 1, -1, 1), 10, 20);
    const auto u = sample(g, [](double, double y) { return y; });
    const auto r = energy_J(u, Weights::uniform(2, 3), 0.0);
    CHECK(r.area_plus == doctest::Approx(4.0));
    CHECK(r.area_minus == doctest::Approx(9.0));
    CHECK(r.total == doctest::Approx(2.0 + 13.0));
}

TEST_CASE("sliced energy examples") {
    for (double W : {1.0, 2.5}) {
        const Grid g(Rect(0, W, -1, 1), int(4 * W), 40);
        const auto u = sample(g, [](double, double y) { return 2 * y; });
        CHECK(sliced_energy_S(u, g.rect(), 0.0) == doctest::Approx(10 * W));
    }
    const Grid g(Rect(0.5, 2.5, -1, 1), 40, 20);
    const auto ux = sample(g, [](double x, double) { return x; });
    CHECK(sliced_energy_S(ux, g.rect(), 0.0) == doctest::Approx(g.rect().area()));
}

TEST_CASE("dx energy examples") {
    const Grid g(Rect(0, 1, 0, 1), 10, 10);
    CHECK(dx_energy(sample(g, [](double x, double) { return x; }), g.rect()) == doctest::Approx(1.0));
    CHECK(dx_energy(sample(g, [](double, double y) { return y * y; }), g.rect()) == 0.0);
}

TEST_CASE("dx energy of the slice field against 1D quadrature") {
    const ProfileParams p(10, 0.1);
    const Grid g = solver_grid(p, 1.0 / 64, 1.0 / 32);
    const auto v = slice_field(p, g);
    const double measured = dx_energy(v, g.rect());
    // int (f')^2 * int_y (dv/df)^2 dy over both ramps; the y integral is 2f below f = 1 and 2/3 above.
    const double slope = (1 + p.alpha) / p.N;
    double exact = 0;
    const int n = 200000;
    for (int k = 0; k < n; ++k) {
        const double x = p.N + (k + 0.5) * p.N / n;
        const double f = f_flat(x, p);
        exact += slope * slope * (f < 1 ? 2 * f : 2.0 / 3) * p.N / n;
    }
    exact *= 2;
    CHECK(measured <= 16 / p.N);
    CHECK(std::abs(measured - exact) <= 0.05 * exact);
}

TEST_CASE("decomposition identity") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 50; ++t) {
        const Grid g(Rect(-2, 1, -1, 1), 30 + t, 20 + t % 7);
        const auto u = random_field(g, rng);
        const auto r = energy_J(u, Weights::unit(), 1e-3);
        const double S = sliced_energy_S(u, g.rect(), 1e-3);
        const double D = dx_energy(u, g.rect());
        CHECK(std::abs(r.total - (S + D)) <= 1e-12 * std::abs(r.total));
        CHECK(r.total == doctest::Approx(r.dirichlet + r.area_plus + r.area_minus).epsilon(1e-14));
        CHECK(S <= r.total * (1 + 1e-14));
    }
}

TEST_CASE("S <= J for 100 random smooth fields") {
    std::mt19937_64 rng(100);
    const Grid g(Rect(-1, 1, -1, 1), 24, 24);
    for (int t = 0; t < 100; ++t) {
        const auto u = random_field(g, rng);
        CHECK(sliced_energy_S(u, g.rect(), 0.0) <= energy_J(u, Weights::unit(), 0.0).total);
    }
}

TEST_CASE("additivity over node-aligned partitions") {
    std::mt19937_64 rng(9);
    const Grid g(Rect(-2, 2, -1, 1), 40, 20);
    const auto w = Weights::named("wavy");
    for (int t = 0; t < 30; ++t) {
        const auto u = random_field(g, rng);
        std::uniform_int_distribution<int> I(1, 39), Jd(1, 19);
        const double xc = g.x(I(rng)), yc = g.y(Jd(rng));
        const Rect parts[4] = {Rect(-2, xc, -1, yc), Rect(xc, 2, -1, yc), Rect(-2, xc, yc, 1),
                               Rect(xc, 2, yc, 1)};
        const auto whole = energy_J(u, w, g.rect(), 1e-3);
        double J = 0, S = 0, D = 0;
        for (const Rect& r : parts) {
            J += energy_J(u, w, r, 1e-3).total;
            S += sliced_energy_S(u, r, 1e-3);
            D += dx_energy(u, r);
        }
        CHECK(J == doctest::Approx(whole.total).epsilon(1e-12));
        CHECK(S == doctest::Approx(sliced_energy_S(u, g.rect(), 1e-3)).epsilon(1e-12));
        CHECK(D == doctest::Approx(dx_energy(u, g.rect())).epsilon(1e-12));
    }
}

TEST_CASE("energy_on_cells matches the rectangle form") {
    std::mt19937_64 rng(12);
    const Grid g(Rect(-1, 1, -1, 1), 16, 16);
    const auto u = random_field(g, rng);
    std::vector<std::pair<int, int>> cells;
    for (int j = 4; j < 12; ++j)
        for (int i = 0; i < 8; ++i) cells.push_back({i, j});
    const double a = energy_on_cells(u, Weights::unit(), cells, 1e-3);
    const double b = energy_J(u, Weights::unit(), Rect(-1, 0, -0.5, 0.5), 1e-3).total;
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    CHECK_THROWS_AS(energy_J(u, Weights::unit(), Rect(-1, 0.05, -1, 1), 0.0), AlignmentError);
}

TEST_CASE("Weiss examples") {
    const Grid g(Rect(-2, 2, -2, 2), 200, 200);
    const auto u = sample(g, [](double, double y) { return y; });
    for (double x0 : {-0.7, 0.0, 0.33})
        CHECK(std::abs(weiss(u, Weights::unit(), {x0, 0}, 0.5, 0.0) - kPi) <= 0.02);
    const auto u2 = sample(g, [](double, double y) { return y > 0 ? y : 2 * y; });
    CHECK(std::abs(weiss(u2, Weights::uniform(1, 2), {0, 0}, 0.6, 0.0) - 2.5 * kPi) <= 0.05);
    const auto z = sample(g, [](double, double) { return 0.0; });
    CHECK(weiss(z, Weights::unit(), {0, 0}, 1, 0.0) == 0.0);
    CHECK_THROWS_AS(weiss(u, Weights::unit(), {1.5, 0}, 1, 0.0), DomainError);
    CHECK_THROWS_AS(weiss(u, Weights::unit(), {0, 0}, 0.05, 0.0), DomainError);
}

TEST_CASE("Weiss is radius-independent for one-homogeneous profiles") {
    const Grid g(Rect(-2, 2, -2, 2), 240, 240);
    for (double lam : {1.0, 1.5, 3.0}) {
        const auto u = sample(g, [&](double, double y) { return lam * y; });
        const double w0 = weiss(u, Weights::unit(), {0, 0}, 0.25, 0.0);
        for (double r : {0.4, 0.8, 1.2, 1.6})
            CHECK(std::abs(weiss(u, Weights::unit(), {0, 0}, r, 0.0) - w0) <= 1e-2);
        // lam^2 pi + pi - lam^2 pi
        CHECK(std::abs(w0 - kPi) <= 0.02);
    }
}

TEST_CASE("Lipschitz estimate") {
    const Grid g(Rect(-1, 1, -1, 1), 20, 20);
    const auto u = sample(g, [](double, double y) { return 2 * y; });
    CHECK(lipschitz_estimate(u, Rect(-0.8, 0.8, -0.8, 0.8)) == doctest::Approx(2.0));
    CHECK_THROWS_AS(lipschitz_estimate(u, Rect(-0.9, 0.9, -0.8, 0.8)), DomainError);

    const ProfileParams p(10, 0.1);
    const Grid gs = solver_grid(p, 1.0 / 64, 1.0 / 32);
    const auto v = slice_field(p, gs);
    const double L = lipschitz_estimate(v, Rect(-29, 29, -0.9375, 0.9375));
    CHECK(L == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("default zero tolerance scales with the field") {
    const Grid g(Rect(0, 1, 0, 1), 4, 4);
    const auto u = sample(g, [](double x, double) { return -3 * x; });
    CHECK(default_zero_tol(u) == doctest::Approx(64 * 2.220446049250313e-16 * 3));
}

}
