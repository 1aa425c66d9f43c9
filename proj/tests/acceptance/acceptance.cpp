// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "fbpool/boundary.hpp"
#include "fbpool/energy.hpp"
#include "fbpool/errors.hpp"
#include "fbpool/freeboundary.hpp"
#include "fbpool/harness.hpp"
#include "fbpool/minimize2d.hpp"
#include "fbpool/regdist.hpp"
#include "fbpool/slice1d.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

using namespace fbpool;

namespace {

constexpr double kPi = 3.14159265358979323846;

int failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void verdict(int id, bool ok, const std::string& what, double secs) {
    std::printf("%s criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", id, what.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++failures;
}

template <class... A>
std::string fmt(const char* f, A... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

template <class... A>
void info(const char* f, A... a) {
    std::printf("    %s\n", fmt(f, a...).c_str());
    std::fflush(stdout);
}

// Guards against a criterion aborting the whole run.
void run(int id, const std::function<void(Timer&)>& body) {
    Timer t;
    try {
        body(t);
    } catch (const std::exception& e) {
        verdict(id, false, std::string("threw: ") + e.what(), t.seconds());
    }
}

double closed_slice_energy(double f) { return f >= 1 ? 2 * f * f + 2 : 4 * f; }

ScalarField2D random_field(const Grid& g, std::mt19937_64& rng) {
    std::normal_distribution<double> Z;
    const double a = Z(rng), b = Z(rng), c = Z(rng), d = Z(rng), k = 1 + std::abs(Z(rng)), s = 0.3 * Z(rng);
    return sample(g, [&](double x, double y) {
        return a * std::sin(k * x + b) * std::cos(y + c) + d * y + s * x * y;
    });
}

std::vector<Point> on_axis(const std::vector<double>& xs) {
    std::vector<Point> p;
    for (double x : xs) p.push_back({x, 0.0});
    return p;
}

VerifyConfig strip_config() {
    VerifyConfig c;
    c.alpha = 0.1;
    c.hy = 1.0 / 64;
    c.hx_max = 1.0 / 32;
    return c;
}

std::map<double, SolveResult> solves;

const SolveResult& solved(double N) {
    auto it = solves.find(N);
    if (it == solves.end()) {
        Timer t;
        it = solves.emplace(N, solve_for(strip_config(), N)).first;
        info("solve N=%g: J=%.5f, %zu stages, %.1f s", N, it->second.final_energy.total,
             it->second.stages.size(), t.seconds());
    }
    return it->second;
}

}  // namespace

int main() {
    std::setvbuf(stdout, nullptr, _IOLBF, 0);

    run(1, [](Timer& t) {
        constexpr double kTol = 5e-3;
        constexpr double kBudget = 10.0;
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> F(0.0, 3.0);
        double worst_e = 0, worst_ab = 0, worst_closed = 0;
        for (int k = 0; k < 200; ++k) {
            const double f = F(rng);
            const SliceSolution c = slice_minimize(f), o = slice_oracle(f, 1000);
            worst_closed = std::max(worst_closed, std::abs(c.energy - closed_slice_energy(f)));
            worst_e = std::max(worst_e, std::abs(c.energy - o.energy));
            worst_ab = std::max({worst_ab, std::abs(c.a - o.a), std::abs(c.b - o.b)});
        }
        const double secs = t.seconds();
        verdict(1, worst_e <= kTol && worst_ab <= kTol && worst_closed <= 1e-12 && secs < kBudget,
                fmt("slice oracle: max |dE| %.2e, max |da|,|db| %.2e, closed-form dev %.1e", worst_e,
                    worst_ab, worst_closed),
                secs);
    });

    run(2, [](Timer& t) {
        constexpr double kRel = 1e-12;
        std::mt19937_64 rng(2);
        std::uniform_int_distribution<int> n(8, 64);
        double worst = 0;
        for (int k = 0; k < 100; ++k) {
            const Grid g(Rect(-2, 2, -1, 1), n(rng), n(rng));
            const auto u = random_field(g, rng);
            const double z = default_zero_tol(u);
            const double J = energy_J(u, Weights::unit(), z).total;
            const double S = sliced_energy_S(u, g.rect(), z), D = dx_energy(u, g.rect());
            worst = std::max(worst, std::abs(J - (S + D)) / std::abs(J));
        }
        verdict(2, worst <= kRel, fmt("decomposition identity: max relative defect %.2e", worst), t.seconds());
    });

    run(3, [](Timer& t) {
        constexpr double kAgree = 0.01;
        bool ok = true;
        std::string detail;
        for (double N : {5.0, 10.0, 20.0}) {
            const ProfileParams p(N, 0.1);
            const Grid g = solver_grid(p, 1.0 / 64, 1.0 / 32);
            const double field = dx_energy(slice_field(p, g), g.rect());
            // int f'(x)^2 int_y (dv/df)^2 dy dx; the inner integral is 2f below f = 1 and 2/3 above.
            double quad = 0;
            const int m = 400000;
            const double L = 3 * N, dx = 2 * L / m, e = 1e-6 * N;
            for (int k = 0; k < m; ++k) {
                const double x = -L + (k + 0.5) * dx;
                const double f = f_flat(x, p);
                const double fp = (f_flat(x + e, p) - f_flat(x - e, p)) / (2 * e);
                quad += fp * fp * (f < 1 ? 2 * f : 2.0 / 3) * dx;
            }
            const double rel = std::abs(field / quad - 1);
            ok = ok && field <= 16 / N && rel <= kAgree;
            detail += fmt(" N=%g: %.5f (16/N=%.2f, 1D %.5f, rel %.1e);", N, field, 16 / N, quad, rel);
        }
        verdict(3, ok, "dx_energy(v_N) <=" + detail, t.seconds());
    });

    run(7, [](Timer& t) {
        constexpr double kFlat = 1e-3, kStable = 0.02, kNear = 0.05;
        const auto fl = flat_graph(20, 1.0);
        double worst_flat = 0;
        for (int k = 0; k < 20; ++k) {
            const double h = std::pow(10.0, -3 + 4.0 * k / 19);
            worst_flat = std::max(worst_flat, std::abs(regdist_eval(fl, {0.0, h}) * kPi / h - 1));
        }
        const QuadLevel coarse{1e-6, 8};
        auto rel = [](double a, double b, double floor) {
            return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
        };
        double worst_stab = 0;
        bool finite = true;
        GrowthReport bump_fine;
        for (const auto& spec : {fl, bump_graph(20, 0.1, 0.5, 1.0)}) {
            const auto a = growth_checks(spec, 100, 1), b = growth_checks(spec, 100, 1, coarse);
            finite = finite && std::isfinite(a.C1) && std::isfinite(a.grad_sup) && std::isfinite(a.hess_dist_sup);
            // Flat-line Hessians are zero to rounding; compare them on an absolute floor.
            worst_stab = std::max({worst_stab, rel(a.C1, b.C1, 0), rel(a.grad_sup, b.grad_sup, 0),
                                   rel(a.hess_dist_sup, b.hess_dist_sup, 1e-6)});
            info("%s: C1 %.5f, sup|grad D| %.5f, sup |D2 D| dist %.3e, near-graph dev %.2e (coarse C1 %.5f)",
                 spec.name.c_str(), a.C1, a.grad_sup, a.hess_dist_sup, a.near_graph_max_rel_dev, b.C1);
            bump_fine = a;
        }
        const bool ok = worst_flat <= kFlat && finite && worst_stab <= kStable &&
                        bump_fine.graph_points == 50 && bump_fine.near_graph_max_rel_dev <= kNear;
        verdict(7, ok,
                fmt("regdist: flat max rel err %.1e, refinement spread %.1e, near-graph |grad D| dev %.1e at %d points",
                    worst_flat, worst_stab, bump_fine.near_graph_max_rel_dev, bump_fine.graph_points),
                t.seconds());
    });

    run(10, [](Timer& t) {
        constexpr double kFit = 0.1;
        const auto r = radial_decay_check({1e2, 1e4, 1e6}, 0.1);
        // Slice derivative energy 2f below f = 1 and 2/3 above, integrated in log r.
        const double a = 0.1, A = 2 * kPi * (1 + a) * (a * (2 - a) + 2.0 / 3.0);
        const bool ok = r.max_rel_err <= kFit && r.monotone && std::abs(r.fitted_A / A - 1) <= kFit;
        verdict(10, ok,
                fmt("radial decay: A %.5f (closed form %.5f), max rel fit err %.1e, E = %.4f, %.4f, %.4f",
                    r.fitted_A, A, r.max_rel_err, r.energies[0], r.energies[1], r.energies[2]),
                t.seconds());
    });

    run(11, [](Timer& t) {
        constexpr double kValue = 0.02, kFlatR = 0.02;
        const Grid g(Rect(-2, 2, -2, 2), 240, 240);
        const auto u = sample(g, [](double, double y) { return y; });
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> X(-0.8, 0.8), R(0.3, 1.0);
        double worst = 0;
        for (int k = 0; k < 10; ++k)
            worst = std::max(worst, std::abs(weiss(u, Weights::unit(), {X(rng), 0.0}, R(rng), 0.0) - kPi));
        struct Profile {
            const char* name;
            std::function<double(double, double)> fn;
            Weights w;
        };
        const double c = std::cos(0.4), s = std::sin(0.4);
        const std::vector<Profile> profiles{
            {"1.5 y", [](double, double y) { return 1.5 * y; }, Weights::unit()},
            {"y+ - 2 y-", [](double, double y) { return y > 0 ? y : 2 * y; }, Weights::uniform(1, 2)},
            {"rotated plane", [&](double x, double y) { return c * y - s * x; }, Weights::unit()}};
        double spread = 0;
        for (const auto& p : profiles) {
            const auto v = sample(g, p.fn);
            double lo = 1e300, hi = -1e300;
            for (double r : {0.25, 0.5, 0.8, 1.2, 1.6}) {
                const double w = weiss(v, p.w, {0, 0}, r, 0.0);
                lo = std::min(lo, w);
                hi = std::max(hi, w);
            }
            info("%s: W in [%.5f, %.5f]", p.name, lo, hi);
            spread = std::max(spread, hi - lo);
        }
        verdict(11, worst <= kValue && spread <= kFlatR,
                fmt("Weiss: max |W - pi| %.2e over 10 centres/radii, r-spread %.2e", worst, spread), t.seconds());
    });

    run(8, [](Timer& t) {
        const Grid g(Rect(-1, 1, -1, 1), 256, 256);
        const double h = g.hx(), rc = 3 * h, bound = 2 * std::max(h, rc);
        struct Case {
            const char* name;
            std::vector<double> E;
            bool segment;
        };
        const std::vector<Case> cases{{"single", {0.0}, false},
                                      {"pair", {-0.4, 0.3}, false},
                                      {"triple", {-0.6, 0.1, 0.5}, false},
                                      {"cantor k=2", cantor_points(2, -0.7, 0.7), false},
                                      {"segment endpoints", {-0.5, 0.5}, true}};
        bool ok = true;
        double worst_h = 0, worst_refl = 0;
        for (const auto& c : cases) {
            const auto p = c.segment ? segment_graph(20, -0.5, 0.5, 1e4, 0.1, kPi, 1)
                                     : points_graph(20, c.E, 200, 0.1, kPi, 1);
            const auto m = c.segment ? segment_graph(20, -0.5, 0.5, 1e4, 0.1, kPi, -1)
                                     : points_graph(20, c.E, 200, 0.1, kPi, -1);
            const auto u = build_almost_minimizer(p, m, g);
            const auto fb = classify_points(extract_boundaries(u, default_zero_tol(u)), rc);
            const double dh = hausdorff(fb.branch_points, on_axis(c.E));
            std::vector<Point> refl;
            for (Point q : fb.points(1)) refl.push_back({q.x, -q.y});
            const double dr = hausdorff(refl, fb.points(-1));
            info("%s: %zu branch points, Hausdorff %.4f (bound %.4f), reflection %.2e (bound %.4f)", c.name,
                 fb.branch_points.size(), dh, bound, dr, h);
            ok = ok && dh <= bound && dr <= h;
            worst_h = std::max(worst_h, dh);
            worst_refl = std::max(worst_refl, dr);
        }
        verdict(8, ok, fmt("branch sets: worst Hausdorff %.4f <= %.4f, worst reflection gap %.2e <= %.4f", worst_h,
                           bound, worst_refl, h),
                t.seconds());
    });

    run(9, [](Timer& t) {
        constexpr double kAlpha = 0.5;
        constexpr int kBalls = 10000;
        constexpr std::uint64_t kSeed = 1;
        const Grid g(Rect(-1, 1, -1, 1), 256, 256);
        const auto y = sample(g, [](double, double y) { return y; });
        const auto exact = almost_min_certificate(y, Weights::unit(), kAlpha, kBalls, kSeed);
        std::vector<double> noise;
        bool noise_ok = exact.at_noise_level;
        for (const auto& l : exact.levels) {
            noise.push_back(l.max_excess);
            noise_ok = noise_ok && l.max_excess <= 1e-10 * l.radius * l.radius;
        }
        // Quadratic cusp at a single branch point; its curvature scale 1/A covers r <= 1/4.
        const auto p = points_graph(20, {0.0}, 4, 0.1, kPi, 1), m = points_graph(20, {0.0}, 4, 0.1, kPi, -1);
        const auto u = build_almost_minimizer(p, m, g);
        const auto w = trace_weights(p, m, g, kAlpha);
        const auto c = almost_min_certificate(u, w, kAlpha, kBalls, kSeed, {}, noise);
        // Exact band minimizer with off-grid free boundaries: the discretization floor.
        const auto fp = flat_graph(20, kPi, 0.1), fm = flat_graph(20, kPi, -0.1);
        const auto band = almost_min_certificate(build_almost_minimizer(fp, fm, g), trace_weights(fp, fm, g, kAlpha),
                                                 kAlpha, kBalls, kSeed);
        for (std::size_t k = 0; k < c.levels.size(); ++k)
            info("r=%.4f  excess %.3e  u=y %.1e  band floor %.3e", c.levels[k].radius, c.levels[k].max_excess,
                 noise[k], band.levels[k].max_excess);
        const double lo = c.levels.back().radius;
        const bool range = std::abs(c.levels.front().radius - 0.25) < 1e-12 && lo >= 8 * g.hx() * (1 - 1e-12) &&
                           lo < 8 * g.hx() * std::sqrt(2.0);
        const bool ok = noise_ok && range && c.resolvable_levels == int(c.levels.size()) && c.slope >= c.threshold;
        verdict(9, ok,
                fmt("certificate: slope %.3f vs threshold %.3f over r in [%.4f, 0.25], C %.3f; u=y max excess %.1e",
                    c.slope, c.threshold, lo, c.fitted_C,
                    *std::max_element(noise.begin(), noise.end())),
                t.seconds());
    });

    run(4, [](Timer& t) {
        constexpr int kBoxes = 20;
        const double N = 20;
        const auto cfg = strip_config();
        const SolveResult& res = solved(N);
        const Grid& g = res.u.grid();
        const Rect dom = g.rect();
        const double tau = discretization_slack(cfg, res);
        const double zu = res.zero_tol, zv = default_zero_tol(res.initial);
        const double Sv = sliced_energy_S(res.initial, dom, zv), Su = sliced_energy_S(res.u, dom, zu);
        const double Ju = res.final_energy.total;
        bool ok = Sv <= Su + tau && Ju <= Sv + 16 / N + tau;
        std::mt19937_64 rng(4);
        std::uniform_int_distribution<int> I(0, g.nx());
        double worst_lo = -1e300, worst_hi = -1e300;
        for (int b = 0; b < kBoxes; ++b) {
            int i0 = I(rng), i1 = I(rng);
            if (i0 == i1) i1 = i0 == g.nx() ? i0 - 1 : i0 + 1;
            if (i0 > i1) std::swap(i0, i1);
            const Rect Q(g.x(i0), g.x(i1), dom.y_lo, dom.y_hi);
            const double sq_u = sliced_energy_S(res.u, Q, zu), sq_v = sliced_energy_S(res.initial, Q, zv);
            const double jq_u = energy_J(res.u, Weights::unit(), Q, zu).total;
            worst_lo = std::max(worst_lo, sq_v - sq_u);
            worst_hi = std::max(worst_hi, jq_u - sq_v - 16 / N);
        }
        ok = ok && worst_lo <= tau && worst_hi <= tau;
        verdict(4, ok && t.seconds() <= 600,
                fmt("energy chain N=20: S(v)-S(u) %.4f, J(u)-S(v)-16/N %.4f, tau %.4f; %d boxes: worst %.4f, %.4f",
                    Sv - Su, Ju - Sv - 16 / N, tau, kBoxes, worst_lo, worst_hi),
                t.seconds());
    });

    run(5, [](Timer& t) {
        const double N = 20;
        const SolveResult& res = solved(N);
        const Grid& g = res.u.grid();
        const double h = std::max(g.hx(), g.hy());
        const auto fb = classify_points(extract_boundaries(res.u, res.zero_tol), 3 * h);
        const auto pools = find_pools(res.u, res.zero_tol, 16 * g.hx() * g.hy());
        const Pool* best = nullptr;
        for (const auto& pl : pools)
            if (!best || pl.area > best->area) best = &pl;
        if (!best) {
            verdict(5, false, "no pool found at N=20", t.seconds());
            return;
        }
        const auto s = summarize_pool_boundary(fb, *best, g);
        const bool ok = best->area >= 0.9 && best->margin_y >= 1.0 / 44 && best->margin_x >= 1.0 &&
                        s.one_phase_plus > 0 && s.one_phase_minus > 0 && s.two_phase > 0 && s.branch_left >= 1 &&
                        s.branch_right >= 1;
        verdict(5, ok,
                fmt("pool N=20: area %.3f, margins y %.4f x %.2f, one-phase +%d -%d, two-phase %d, branch L%d R%d",
                    best->area, best->margin_y, best->margin_x, s.one_phase_plus, s.one_phase_minus, s.two_phase,
                    s.branch_left, s.branch_right),
                t.seconds());
    });

    run(6, [](Timer& t) {
        constexpr double kSlack = 0.02, kTheta = 0.15;
        const double alpha = strip_config().alpha, delta = strip_config().delta;
        std::map<double, double> theta;
        bool ok = true;
        StripReport last;
        for (double N : {5.0, 10.0, 20.0}) {
            const SolveResult& res = solved(N);
            const auto sr = strip_checks(res.u, ProfileParams(N, alpha), delta, res.zero_tol);
            theta[N] = sr.theta;
            info("N=%g: strip min %.4f max %.4f, sign strip %.4f / %.4f, theta %.4f", N, sr.plus_strip_min,
                 sr.minus_strip_max, sr.min_y_positive, sr.max_y_negative, sr.theta);
            if (N == 20) last = sr;
        }
        ok = last.plus_strip_min >= 1.0 / 8 - kSlack && last.minus_strip_max <= -1.0 / 8 + kSlack &&
             last.min_y_positive > alpha / 8 - kSlack && last.max_y_negative < -alpha / 8 + kSlack &&
             theta[20] <= kTheta && theta[10] <= theta[5] && theta[20] <= theta[10];
        verdict(6, ok,
                fmt("strips N=20: u >= %.4f on R+, <= %.4f on R-, u>0 => y >= %.4f; theta 5/10/20 = %.4f %.4f %.4f",
                    last.plus_strip_min, last.minus_strip_max, last.min_y_positive, theta[5], theta[10], theta[20]),
                t.seconds());
    });

    std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
