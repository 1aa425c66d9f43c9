#include "fbpool/regdist.hpp"

#include "quad.hpp"

#include "fbpool/energy.hpp"
#include "fbpool/errors.hpp"
#include "fbpool/minimize2d.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/tools/minima.hpp>
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace fbpool {

namespace {

constexpr double kPi = std::numbers::pi;

// Smooth cutoff: 1 on |x| <= R/20, 0 on |x| >= R/10.
struct Cutoff {
    double a, L;
    static double e(double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; }
    static double de(double t) { return t > 0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }
    double value(double x) const {
        const double ax = std::abs(x);
        if (ax <= a) return 1.0;
        if (ax >= L) return 0.0;
        const double t = (L - ax) / (L - a);
        return e(t) / (e(t) + e(1 - t));
    }
    double deriv(double x) const {
        const double ax = std::abs(x);
        if (ax <= a || ax >= L) return 0.0;
        const double t = (L - ax) / (L - a);
        const double p = e(t), q = e(1 - t), dp = de(t), dq = -de(1 - t);
        const double dS = (dp * (p + q) - p * (dp + dq)) / ((p + q) * (p + q));
        return dS * (x > 0 ? -1.0 : 1.0) / (L - a);
    }
};

struct Saturate {
    double A, H;
    double value(double s) const { return A * s / (1 + A * s / H); }
    double deriv(double s) const {
        const double d = 1 + A * s / H;
        return A / (d * d);
    }
};

GraphMeasureSpec base(double R, double q, const std::string& name) {
    if (!(R > 0)) throw DomainError("graph: R must be positive");
    if (!(q > 0)) throw DomainError("graph: q must be positive");
    GraphMeasureSpec g;
    g.R = R;
    g.q = [q](Point) { return q; };
    g.q_tail = q;
    g.name = name;
    return g;
}

}  // namespace

GraphMeasureSpec flat_graph(double R, double q, double offset) {
    GraphMeasureSpec g = base(R, q, "flat");
    g.f = [offset](double) { return offset; };
    g.df = [](double) { return 0.0; };
    g.tail_height = offset;
    return g;
}

GraphMeasureSpec cubic_cusp_graph(double R, double amplitude, double q, int sign) {
    GraphMeasureSpec g = base(R, q, "cubic-cusp");
    const Cutoff c{R / 20, R / 10};
    const double s = sign >= 0 ? amplitude : -amplitude;
    g.f = [c, s](double x) { return x > 0 ? s * x * x * x * c.value(x) : 0.0; };
    g.df = [c, s](double x) { return x > 0 ? s * (3 * x * x * c.value(x) + x * x * x * c.deriv(x)) : 0.0; };
    g.breakpoints = {0.0, -R / 20, R / 20};
    return g;
}

GraphMeasureSpec bump_graph(double R, double amplitude, double width, double q, int sign) {
    GraphMeasureSpec g = base(R, q, "bump");
    const Cutoff c{R / 20, R / 10};
    const double s = sign >= 0 ? amplitude : -amplitude;
    const double w2 = width * width;
    g.f = [c, s, w2](double x) { return s * std::exp(-x * x / w2) * c.value(x); };
    g.df = [c, s, w2](double x) {
        const double e = std::exp(-x * x / w2);
        return s * (-2 * x / w2 * e * c.value(x) + e * c.deriv(x));
    };
    g.breakpoints = {0.0, -R / 20, R / 20};
    return g;
}

GraphMeasureSpec points_graph(double R, std::vector<double> points, double A, double H, double q,
                              int sign) {
    if (points.empty()) throw DomainError("points_graph: empty point set");
    if (!(A > 0 && H > 0)) throw DomainError("points_graph: A and H must be positive");
    GraphMeasureSpec g = base(R, q, "points-list");
    const Cutoff c{R / 20, R / 10};
    const Saturate rho{A, H};
    const double sg = sign >= 0 ? 1.0 : -1.0;
    std::sort(points.begin(), points.end());
    for (double e : points)
        if (std::abs(e) >= R / 20) throw DomainError("points_graph: points must lie inside |x| < R/20");
    auto sdist = [points](double x, double* ds) {
        double S = 0.0, dS = 0.0;
        for (double e : points) {
            const double t = x - e;
            if (t == 0.0) {
                if (ds) *ds = 0.0;
                return 0.0;
            }
            S += 1.0 / (t * t);
            dS += -2.0 / (t * t * t);
        }
        const double s = 1.0 / S;
        if (ds) *ds = -dS * s * s;
        return s;
    };
    g.f = [=](double x) { return sg * rho.value(sdist(x, nullptr)) * c.value(x); };
    g.df = [=](double x) {
        double ds = 0.0;
        const double s = sdist(x, &ds);
        return sg * (rho.deriv(s) * ds * c.value(x) + rho.value(s) * c.deriv(x));
    };
    g.breakpoints = points;
    g.breakpoints.push_back(-R / 20);
    g.breakpoints.push_back(R / 20);
    return g;
}

std::vector<double> cantor_points(int k, double lo, double hi) {
    if (k < 0 || k > 12 || !(lo < hi)) throw DomainError("cantor_points: bad parameters");
    std::vector<std::pair<double, double>> iv{{0.0, 1.0}};
    for (int level = 0; level < k; ++level) {
        std::vector<std::pair<double, double>> next;
        for (auto [a, b] : iv) {
            const double t = (b - a) / 3;
            next.emplace_back(a, a + t);
            next.emplace_back(b - t, b);
        }
        iv.swap(next);
    }
    std::vector<double> pts;
    for (auto [a, b] : iv) {
        pts.push_back(lo + (hi - lo) * a);
        pts.push_back(lo + (hi - lo) * b);
    }
    return pts;
}

GraphMeasureSpec segment_graph(double R, double a, double b, double A, double H, double q,
                               int sign) {
    if (!(a < b) || std::abs(a) >= R / 20 || std::abs(b) >= R / 20)
        throw DomainError("segment_graph: need a < b inside |x| < R/20");
    GraphMeasureSpec g = base(R, q, "segment");
    const Cutoff c{R / 20, R / 10};
    const Saturate rho{A, H};
    const double sg = sign >= 0 ? 1.0 : -1.0;
    auto cube = [a, b](double x, double* ds) {
        const double t = x < a ? a - x : (x > b ? x - b : 0.0);
        if (ds) *ds = x < a ? -3 * t * t : 3 * t * t;
        return t * t * t;
    };
    g.f = [=](double x) { return sg * rho.value(cube(x, nullptr)) * c.value(x); };
    g.df = [=](double x) {
        double ds = 0.0;
        const double s = cube(x, &ds);
        return sg * (rho.deriv(s) * ds * c.value(x) + rho.value(s) * c.deriv(x));
    };
    g.breakpoints = {a, b, -R / 20, R / 20};
    return g;
}

GraphMeasureSpec graph_from_json(const std::string& text, double R) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("graph spec: ") + e.what());
    }
    const std::string type = j.value("type", "");
    const double q = j.value("q", 1.0);
    const int sign = j.value("sign", 1);
    GraphMeasureSpec g;
    if (type == "flat") {
        g = flat_graph(R, q, j.value("offset", 0.0));
    } else if (type == "cubic-cusp") {
        g = cubic_cusp_graph(R, j.value("amplitude", 1.0), q, sign);
    } else if (type == "bump") {
        g = bump_graph(R, j.value("amplitude", 0.1), j.value("width", 0.5), q, sign);
    } else if (type == "points-list") {
        g = points_graph(R, j.at("points").get<std::vector<double>>(), j.value("A", 200.0),
                         j.value("H", 0.1), q, sign);
    } else if (type == "cantor-k") {
        g = points_graph(R, cantor_points(j.value("k", 2), j.value("lo", -0.7), j.value("hi", 0.7)),
                         j.value("A", 200.0), j.value("H", 0.1), q, sign);
        g.name = "cantor-k";
    } else if (type == "segment") {
        g = segment_graph(R, j.value("a", -0.5), j.value("b", 0.5), j.value("A", 1e4),
                          j.value("H", 0.1), q, sign);
    } else {
        throw DomainError("graph spec: unknown type '" + type + "'");
    }
    g.beta = j.value("beta", 1.0);
    return g;
}

GraphProjection project_to_graph(const GraphMeasureSpec& spec, Point x) {
    const double L = spec.core(), c = spec.tail_height;
    // Tails first: they bound the search window for the core.
    GraphProjection best{std::numeric_limits<double>::infinity(), 0.0};
    auto consider = [&](double s, double d) {
        if (d < best.distance) best = {d, s};
    };
    consider(std::max(x.x, L), std::hypot(std::max(L - x.x, 0.0), x.y - c));
    consider(std::min(x.x, -L), std::hypot(std::max(x.x + L, 0.0), x.y - c));
    if (std::abs(x.x) < L) consider(x.x, std::abs(x.y - spec.f(x.x)));
    const double lo = std::max(-L, x.x - best.distance), hi = std::min(L, x.x + best.distance);
    if (lo < hi) {
        auto g = [&](double s) {
            const double dy = spec.height(s) - x.y;
            return (s - x.x) * (s - x.x) + dy * dy;
        };
        constexpr int kScan = 200;
        int kb = 0;
        double gb = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= kScan; ++k) {
            const double s = lo + (hi - lo) * k / kScan;
            const double v = g(s);
            if (v < gb) {
                gb = v;
                kb = k;
            }
        }
        const double a = lo + (hi - lo) * std::max(kb - 1, 0) / kScan;
        const double b = lo + (hi - lo) * std::min(kb + 1, kScan) / kScan;
        const auto m = boost::math::tools::brent_find_minima(g, a, b, 52);
        consider(m.first, std::sqrt(std::max(m.second, 0.0)));
        consider(lo + (hi - lo) * kb / kScan, std::sqrt(gb));
    }
    return best;
}

namespace {

struct Integrals {
    double I = 0.0, Ix = 0.0, Iy = 0.0;
};

// Right tail: integral over s >= L of ((s - x1)^2 + b^2)^{-p/2}, with c = L - x1.
Integrals tail(double c, double b, double beta, bool want_grad, int side, const QuadLevel& ql) {
    Integrals r;
    const double B = std::abs(b);
    const double p = 1 + beta;
    if (beta == 1.0) {
        const double D2 = B * B + c * c;
        if (B == 0.0) {
            if (c <= 0) throw SingularityError("regdist: point lies on a graph tail");
            r.I = 1.0 / c;
        } else {
            r.I = (kPi / 2 - std::atan(c / B)) / B;
        }
        if (want_grad) {
            r.Ix = side * (1.0 / D2);
            r.Iy = (B < 1e-12 * std::max(std::abs(c), 1e-300)) ? 0.0
                                                               : (b > 0 ? 1.0 : -1.0) * (-r.I / B + c / (B * D2));
        }
        return r;
    }
    boost::math::quadrature::exp_sinh<double> es;
    auto base = [=](double s) { return (c + s) * (c + s) + b * b; };
    r.I = es.integrate([&](double s) { return std::pow(base(s), -p / 2); }, 0.0,
                       std::numeric_limits<double>::infinity(), ql.tol);
    if (want_grad) {
        r.Ix = side * es.integrate([&](double s) { return p * (c + s) * std::pow(base(s), -p / 2 - 1); },
                                   0.0, std::numeric_limits<double>::infinity(), ql.tol);
        r.Iy = es.integrate([&](double s) { return -p * b * std::pow(base(s), -p / 2 - 1); }, 0.0,
                            std::numeric_limits<double>::infinity(), ql.tol);
    }
    return r;
}

Integrals integrate_measure(const GraphMeasureSpec& spec, Point x, bool want_grad,
                            const QuadLevel& ql) {
    if (spec.d != 1) throw DomainError("regdist: only d = 1 is supported");
    if (!(spec.beta > 0)) throw DomainError("regdist: beta must be positive for a convergent tail");
    const GraphProjection pr = project_to_graph(spec, x);
    if (!(pr.distance > 0)) throw SingularityError("regdist: point lies on the graph");
    const double L = spec.core();
    const double p = 1 + spec.beta;

    // Pieces are integrated in the offset t = s - sn so that dx, dy keep their relative precision
    // near the graph; absolute abscissae lose it when dist << |x|.
    const double sn = std::clamp(pr.s, -L, L);
    const double fn = spec.f(sn);
    const double ex = x.x - sn, ey = x.y - fn;
    std::vector<double> pts{-L - sn, L - sn};
    for (double b : spec.breakpoints)
        if (b > -L && b < L) pts.push_back(b - sn);
    const double w0 = pr.distance / std::sqrt(1 + std::pow(spec.slope(sn), 2));
    for (double off = w0; off < 2 * L; off *= 4) {
        if (sn - off > -L) pts.push_back(-off);
        if (sn + off < L) pts.push_back(off);
    }
    if (sn > -L && sn < L) pts.push_back(0.0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    Integrals r;
    auto geom = [&](double t, double& wt, double& dx, double& dy, double& r2) {
        const double s = sn + t;
        const double fs = spec.f(s), fp = spec.df(s);
        wt = std::sqrt(1 + fp * fp) / spec.q({s, fs});
        dx = ex - t;
        dy = ey - (fs - fn);
        r2 = dx * dx + dy * dy;
    };
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double a = pts[k], b = pts[k + 1];
        r.I += detail::gk31(
            [&](double t) {
                double wt, dx, dy, r2;
                geom(t, wt, dx, dy, r2);
                return wt * std::pow(r2, -p / 2);
            },
            a, b, ql.max_depth, ql.tol);
        if (want_grad) {
            r.Ix += detail::gk31(
                [&](double t) {
                    double wt, dx, dy, r2;
                    geom(t, wt, dx, dy, r2);
                    return -p * wt * std::pow(r2, -p / 2 - 1) * dx;
                },
                a, b, ql.max_depth, ql.tol);
            r.Iy += detail::gk31(
                [&](double t) {
                    double wt, dx, dy, r2;
                    geom(t, wt, dx, dy, r2);
                    return -p * wt * std::pow(r2, -p / 2 - 1) * dy;
                },
                a, b, ql.max_depth, ql.tol);
        }
    }
    const double b = x.y - spec.tail_height;
    const Integrals right = tail(L - x.x, b, spec.beta, want_grad, 1, ql);
    const Integrals left = tail(L + x.x, b, spec.beta, want_grad, -1, ql);
    r.I += (right.I + left.I) / spec.q_tail;
    r.Ix += (right.Ix + left.Ix) / spec.q_tail;
    r.Iy += (right.Iy + left.Iy) / spec.q_tail;
    if (!std::isfinite(r.I) || !(r.I > 0)) throw NumericError("regdist: quadrature failed");
    return r;
}

}  // namespace

double regdist_eval(const GraphMeasureSpec& spec, Point x, const QuadLevel& q) {
    const Integrals r = integrate_measure(spec, x, false, q);
    return std::pow(r.I, -1.0 / spec.beta);
}

std::array<double, 3> regdist_eval_grad(const GraphMeasureSpec& spec, Point x, const QuadLevel& q) {
    const Integrals r = integrate_measure(spec, x, true, q);
    const double D = std::pow(r.I, -1.0 / spec.beta);
    const double k = -(1.0 / spec.beta) * D / r.I;
    return {D, k * r.Ix, k * r.Iy};
}

double calibrate_gradient_constant(const QuadLevel& q) {
    const GraphMeasureSpec flat = flat_graph(20.0, 1.0);
    const auto g = regdist_eval_grad(flat, {0.0, 1e-2}, q);
    const double theta = 2.0;  // 2 / q with q = 1
    return std::hypot(g[1], g[2]) * theta;
}

ScalarField2D build_almost_minimizer(const GraphMeasureSpec& plus, const GraphMeasureSpec& minus,
                                     const Grid& grid, const QuadLevel& q) {
    const Rect& r = grid.rect();
    const double R = std::min(plus.R, minus.R);
    for (double cx : {r.x_lo, r.x_hi})
        for (double cy : {r.y_lo, r.y_hi})
            if (std::hypot(cx, cy) >= R) throw DomainError("build_almost_minimizer: grid leaves B(0,R)");
    std::vector<double> xs;
    for (int i = 0; i <= grid.nx(); ++i) xs.push_back(grid.x(i));
    for (double b : plus.breakpoints) xs.push_back(b);
    for (double b : minus.breakpoints) xs.push_back(b);
    for (double x : xs)
        if (minus.height(x) > plus.height(x) + 1e-15)
            throw DomainError("build_almost_minimizer: lower graph lies above the upper graph");
    std::vector<double> v(grid.node_count(), 0.0);
    for (int i = 0; i <= grid.nx(); ++i) {
        const double x = grid.x(i);
        const double fp = plus.height(x), fm = minus.height(x);
        for (int j = 0; j <= grid.ny(); ++j) {
            const double y = grid.y(j);
            double val = 0.0;
            if (y > fp) val = regdist_eval(plus, {x, y}, q);
            else if (y < fm) val = -regdist_eval(minus, {x, y}, q);
            v[grid.index(i, j)] = val;
        }
    }
    return ScalarField2D(grid, std::move(v));
}

GrowthReport growth_checks(const GraphMeasureSpec& spec, int sample_n, std::uint64_t seed,
                           const QuadLevel& q, int graph_points) {
    if (sample_n < 100) throw DomainError("growth_checks: sample_n must be >= 100");
    GrowthReport rep;
    std::mt19937_64 rng(seed);
    const double L = spec.core();
    std::uniform_real_distribution<double> U(-0.9 * L, 0.9 * L);
    auto normal = [&](double s) {
        const double fp = spec.slope(s);
        const double n = std::sqrt(1 + fp * fp);
        return Point{-fp / n, 1.0 / n};
    };
    for (int k = 0; k < sample_n; ++k) {
        const double s = U(rng);
        const Point nu = normal(s);
        const Point Q{s, spec.height(s)};
        for (int lev = 1; lev <= 8; ++lev) {
            const double t = std::ldexp(1.0, -lev);
            const Point x{Q.x + t * nu.x, Q.y + t * nu.y};
            const double dist = project_to_graph(spec, x).distance;
            const auto g = regdist_eval_grad(spec, x, q);
            rep.C1 = std::max({rep.C1, g[0] / dist, dist / g[0]});
            rep.grad_sup = std::max(rep.grad_sup, std::hypot(g[1], g[2]));
            const double eta = 1e-3 * dist;
            const auto gxp = regdist_eval_grad(spec, {x.x + eta, x.y}, q);
            const auto gxm = regdist_eval_grad(spec, {x.x - eta, x.y}, q);
            const auto gyp = regdist_eval_grad(spec, {x.x, x.y + eta}, q);
            const auto gym = regdist_eval_grad(spec, {x.x, x.y - eta}, q);
            const double hxx = (gxp[1] - gxm[1]) / (2 * eta);
            const double hyy = (gyp[2] - gym[2]) / (2 * eta);
            const double hxy = 0.5 * ((gxp[2] - gxm[2]) + (gyp[1] - gym[1])) / (2 * eta);
            const double mean = 0.5 * (hxx + hyy);
            const double rad = std::hypot(0.5 * (hxx - hyy), hxy);
            const double norm = std::max(std::abs(mean + rad), std::abs(mean - rad));
            rep.hess_dist_sup = std::max(rep.hess_dist_sup, norm * dist);
            ++rep.samples;
        }
    }
    for (int k = 0; k < graph_points; ++k) {
        const double s = -0.9 * L + 1.8 * L * (k + 0.5) / graph_points;
        const Point nu = normal(s);
        const Point Q{s, spec.height(s)};
        const double t = 1e-5;
        const auto g = regdist_eval_grad(spec, {Q.x + t * nu.x, Q.y + t * nu.y}, q);
        const double theta = 2.0 / spec.weight(Q);
        const double expect = kGradCalibration * std::pow(theta, -1.0 / spec.beta);
        rep.near_graph_max_rel_dev =
            std::max(rep.near_graph_max_rel_dev, std::abs(std::hypot(g[1], g[2]) / expect - 1));
        ++rep.graph_points;
    }
    return rep;
}

BarrierResult barrier_compare(const ScalarField2D& u, Point center, double radius,
                              const BarrierParams& p, BarrierDirection dir) {
    const Grid& g = u.grid();
    BarrierResult res;
    res.worst_margin = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= g.ny(); ++j) {
        const double y = g.y(j) - center.y;
        if (std::abs(y) > radius) continue;
        for (int i = 0; i <= g.nx(); ++i) {
            const double x = g.x(i) - center.x;
            if (x * x + y * y > radius * radius) continue;
            double margin;
            if (dir == BarrierDirection::sub) {
                const double t = y - p.t;
                const double w = t > 0 ? p.M_plus * t : p.m_minus * t;
                margin = u(i, j) - w;
            } else {
                const double t = y + p.t;
                const double w = t > 0 ? p.m_plus * t : p.M_minus * t;
                margin = w - u(i, j);
            }
            res.worst_margin = std::min(res.worst_margin, margin);
        }
    }
    res.ordered = res.worst_margin >= -1e-12;
    return res;
}

double barrier_slide(const ScalarField2D& u, Point center, double radius, BarrierParams p,
                     BarrierDirection dir, double t_max, double t_min, int steps) {
    if (steps < 1) throw DomainError("barrier_slide: steps must be >= 1");
    for (int k = 0; k <= steps; ++k) {
        p.t = t_max - (t_max - t_min) * k / steps;
        if (!barrier_compare(u, center, radius, p, dir).ordered) return p.t;
    }
    return t_min - 1.0;
}

Weights trace_weights(const GraphMeasureSpec& plus, const GraphMeasureSpec& minus,
                      const Grid& grid, double holder_alpha, const QuadLevel& q) {
    const int n = grid.nx() + 1;
    auto tp = std::make_shared<std::vector<double>>(n), tm = std::make_shared<std::vector<double>>(n);
    const double t0 = 1e-5;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = grid.x(i);
        const auto gp = regdist_eval_grad(plus, {x, plus.height(x) + t0}, q);
        const auto gm = regdist_eval_grad(minus, {x, minus.height(x) - t0}, q);
        (*tp)[i] = std::hypot(gp[1], gp[2]);
        (*tm)[i] = std::hypot(gm[1], gm[2]);
        lo = std::min({lo, (*tp)[i], (*tm)[i]});
        hi = std::max({hi, (*tp)[i], (*tm)[i]});
    }
    const double x0 = grid.rect().x_lo, hx = grid.hx();
    auto interp = [x0, hx, n](const std::vector<double>& t, double x) {
        const double s = std::clamp((x - x0) / hx, 0.0, double(n - 1));
        const int i = std::min(int(s), n - 2);
        const double a = s - i;
        return (1 - a) * t[i] + a * t[i + 1];
    };
    Weights w;
    w.q_plus = [tp, interp](Point p) { return interp(*tp, p.x); };
    w.q_minus = [tm, interp](Point p) { return interp(*tm, p.x); };
    w.constant = false;
    w.holder_alpha = holder_alpha;
    w.c0 = std::min(lo, 1.0 / hi);
    return w;
}

double ball_excess(const ScalarField2D& u, const Weights& w, Point c, double r, double zero_tol) {
    const Grid& g = u.grid();
    const BallStencil st = ball_stencil(g, {c, r});
    if (st.nodes.empty()) return 0.0;
    const double eu = energy_on_cells(g, u.data(), w, st.cells, zero_tol);
    double best = std::numeric_limits<double>::infinity();
    auto consider = [&](const double* v) { best = std::min(best, energy_on_cells(g, v, w, st.cells, zero_tol)); };

    const std::vector<double> harm = harmonic_in_ball(u, st);
    consider(harm.data());

    std::vector<double> work = u.values();
    for (std::size_t a : st.nodes) work[a] = 0.0;
    consider(work.data());

    // Two-plane profiles blended in with a cutoff that is 1 on B(c, r/2).
    const double ap = w.q_plus(c), am = w.q_minus(c);
    const std::size_t row = std::size_t(g.nx() + 1);
    const double offsets[][2] = {{0, 0},           {r / 4, r / 4},   {-r / 4, -r / 4},
                                 {r / 2, r / 2},   {-r / 2, -r / 2}, {r / 8, -r / 8},
                                 {r / 4, -r / 4}};
    for (const auto& o : offsets) {
        for (std::size_t a : st.nodes) {
            const int i = int(a % row), j = int(a / row);
            const double dx = g.x(i) - c.x, dy = g.y(j) - c.y;
            const double y = dy;
            const double P = (y > o[0] ? ap * (y - o[0]) : 0.0) + (y < o[1] ? am * (y - o[1]) : 0.0);
            const double phi = std::clamp(2 - 2 * std::hypot(dx, dy) / r, 0.0, 1.0);
            work[a] = u.data()[a] + phi * (P - u.data()[a]);
        }
        consider(work.data());
    }
    return std::max(0.0, eu - best);
}

CertificateReport almost_min_certificate(const ScalarField2D& u, const Weights& w,
                                         double holder_alpha, int n_balls, std::uint64_t seed,
                                         const std::vector<Point>& focus,
                                         const std::vector<double>& noise, double r0) {
    const Grid& g = u.grid();
    const Rect& R = g.rect();
    const double h = std::max(g.hx(), g.hy());
    const int n = 2;
    CertificateReport rep;
    rep.threshold = n + holder_alpha / (4 * n + 2 * holder_alpha) - 0.3;
    std::vector<double> radii;
    for (int k = 0;; ++k) {
        const double r = r0 * std::pow(2.0, -0.5 * k);
        if (r < 8 * h * (1 - 1e-12)) break;
        radii.push_back(r);
    }
    if (radii.empty()) throw DomainError("almost_min_certificate: r0 below 8h");
    const int per = std::max(1, n_balls / int(radii.size()));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double ztol = default_zero_tol(u);
    for (std::size_t k = 0; k < radii.size(); ++k) {
        const double r = radii[k];
        const double m = r + 2 * h;
        if (2 * m >= R.width() || 2 * m >= R.height())
            throw DomainError("almost_min_certificate: ball does not fit in the domain");
        CertificateLevel lev;
        lev.radius = r;
        for (int b = 0; b < per; ++b) {
            Point c;
            if (!focus.empty()) {
                const Point f = focus[std::size_t(b) % focus.size()];
                const double ang = 2 * kPi * U(rng), rad = 0.5 * r * U(rng);
                c = {f.x + rad * std::cos(ang), f.y + rad * std::sin(ang)};
            } else {
                c = {R.x_lo + m + (R.width() - 2 * m) * U(rng), R.y_lo + m + (R.height() - 2 * m) * U(rng)};
            }
            c.x = std::clamp(c.x, R.x_lo + m, R.x_hi - m);
            c.y = std::clamp(c.y, R.y_lo + m, R.y_hi - m);
            lev.max_excess = std::max(lev.max_excess, ball_excess(u, w, c, r, ztol));
            ++lev.balls;
        }
        lev.noise = k < noise.size() ? noise[k] : 0.0;
        const double floor = std::max(lev.noise, 1e-12 * r * r);
        lev.resolvable = lev.max_excess > 10 * floor;
        rep.levels.push_back(lev);
    }
    std::vector<double> lx, ly;
    for (const auto& lev : rep.levels) {
        rep.fitted_C = std::max(rep.fitted_C, lev.max_excess / std::pow(lev.radius, rep.threshold + 0.3));
        if (lev.resolvable) {
            lx.push_back(std::log(lev.radius));
            ly.push_back(std::log(lev.max_excess));
        }
    }
    rep.resolvable_levels = int(lx.size());
    if (lx.empty()) {
        rep.at_noise_level = true;
        rep.passed = true;
        rep.status = "excess at noise level";
        return rep;
    }
    if (lx.size() == 1) {
        rep.passed = false;
        rep.status = "single resolvable level; slope undetermined";
        return rep;
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    rep.slope = sxy / sxx;
    rep.passed = rep.slope >= rep.threshold;
    rep.status = rep.passed ? "slope above threshold" : "slope below threshold";
    return rep;
}

}  // namespace fbpool
