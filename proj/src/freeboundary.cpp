#include "fbpool/freeboundary.hpp"

#include "fbpool/energy.hpp"
#include "fbpool/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace fbpool {

namespace {

std::vector<std::int8_t> cell_signs(const ScalarField2D& u, double ztol) {
    const Grid& g = u.grid();
    std::vector<std::int8_t> s(std::size_t(g.nx()) * g.ny());
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) s[std::size_t(j) * g.nx() + i] = std::int8_t(cell_sign(u, i, j, ztol));
    return s;
}

void contour(const Grid& g, const std::vector<std::int8_t>& sign, int want,
             std::vector<FbVertex>& verts, std::vector<Polyline>& lines) {
    const int nx = g.nx(), ny = g.ny();
    auto in = [&](int a, int b) { return sign[std::size_t(b) * nx + a] == want; };
    std::unordered_map<long long, int> id_of;
    std::vector<std::array<int, 2>> adj;
    // Crossing between cells p and q (p inside); key identifies the primal edge they share.
    auto vertex = [&](int pa, int pb, int qa, int qb) {
        const bool vertical = pb == qb;  // horizontal neighbours share a vertical primal edge
        const int ea = std::max(pa, qa), eb = std::max(pb, qb);
        const long long key = 2LL * (static_cast<long long>(vertical ? pb : eb) * (nx + 1) +
                                     (vertical ? ea : pa)) +
                              (vertical ? 0 : 1);
        auto it = id_of.find(key);
        if (it != id_of.end()) return it->second;
        FbVertex v;
        v.p = vertical ? Point{g.x(ea), g.y(pb) + 0.5 * g.hy()} : Point{g.x(pa) + 0.5 * g.hx(), g.y(eb)};
        const bool pin = in(pa, pb);
        v.cell_in = pin ? pb * nx + pa : qb * nx + qa;
        v.cell_out = pin ? qb * nx + qa : pb * nx + pa;
        const int id = int(verts.size());
        verts.push_back(v);
        adj.push_back({-1, -1});
        id_of.emplace(key, id);
        return id;
    };
    auto link = [&](int a, int b) {
        for (int* s : {&adj[a][0], &adj[a][1]})
            if (*s < 0) {
                *s = b;
                break;
            }
        for (int* s : {&adj[b][0], &adj[b][1]})
            if (*s < 0) {
                *s = a;
                break;
            }
    };
    for (int b = 0; b + 1 < ny; ++b) {
        for (int a = 0; a + 1 < nx; ++a) {
            const bool c0 = in(a, b), c1 = in(a + 1, b), c2 = in(a + 1, b + 1), c3 = in(a, b + 1);
            const int code = c0 | (c1 << 1) | (c2 << 2) | (c3 << 3);
            if (code == 0 || code == 15) continue;
            // Edges: 0 bottom (c0,c1), 1 right (c1,c2), 2 top (c2,c3), 3 left (c3,c0).
            auto e = [&](int k) {
                switch (k) {
                    case 0: return vertex(a, b, a + 1, b);
                    case 1: return vertex(a + 1, b, a + 1, b + 1);
                    case 2: return vertex(a, b + 1, a + 1, b + 1);
                    default: return vertex(a, b, a, b + 1);
                }
            };
            if (code == 5) {  // c0, c2 inside: keep them apart
                link(e(3), e(0));
                link(e(1), e(2));
                continue;
            }
            if (code == 10) {
                link(e(0), e(1));
                link(e(2), e(3));
                continue;
            }
            int ends[2], n = 0;
            const bool c[4] = {c0, c1, c2, c3};
            for (int k = 0; k < 4; ++k)
                if (c[k] != c[(k + 1) % 4]) ends[n++] = k;
            link(e(ends[0]), e(ends[1]));
        }
    }
    std::vector<std::uint8_t> seen(verts.size(), 0);
    auto walk = [&](int start, bool closed) {
        Polyline pl;
        pl.closed = closed;
        int prev = -1, cur = start;
        while (cur >= 0 && !seen[cur]) {
            seen[cur] = 1;
            pl.vid.push_back(cur);
            const int nxt = adj[cur][0] != prev ? adj[cur][0] : adj[cur][1];
            prev = cur;
            cur = nxt;
        }
        lines.push_back(std::move(pl));
    };
    for (int v = 0; v < int(verts.size()); ++v)
        if (!seen[v] && (adj[v][0] < 0 || adj[v][1] < 0)) walk(v, false);
    for (int v = 0; v < int(verts.size()); ++v)
        if (!seen[v]) walk(v, true);
}

// Bucketed point-to-segment queries.
class SegmentIndex {
public:
    SegmentIndex(const std::vector<FbVertex>& v, const std::vector<Polyline>& lines, double cell)
        : cell_(cell) {
        for (const auto& pl : lines) {
            const int n = int(pl.vid.size());
            if (n == 1) add(v[pl.vid[0]].p, v[pl.vid[0]].p);
            for (int k = 0; k + 1 < n; ++k) add(v[pl.vid[k]].p, v[pl.vid[k + 1]].p);
            if (pl.closed && n > 2) add(v[pl.vid[n - 1]].p, v[pl.vid[0]].p);
        }
    }
    double distance(Point p, double cap) const {
        double best = std::numeric_limits<double>::infinity();
        const long long cx = key1(p.x), cy = key1(p.y);
        const int reach = int(std::ceil(cap / cell_));
        for (long long by = cy - reach; by <= cy + reach; ++by)
            for (long long bx = cx - reach; bx <= cx + reach; ++bx) {
                auto it = buckets_.find(key(bx, by));
                if (it == buckets_.end()) continue;
                for (int s : it->second) best = std::min(best, seg_dist(p, segs_[s]));
            }
        return best;
    }

private:
    struct Seg {
        Point a, b;
    };
    long long key1(double v) const { return static_cast<long long>(std::floor(v / cell_)); }
    static long long key(long long x, long long y) { return (x << 32) ^ (y & 0xffffffffLL); }
    void add(Point a, Point b) {
        const int id = int(segs_.size());
        segs_.push_back({a, b});
        for (long long by = key1(std::min(a.y, b.y)); by <= key1(std::max(a.y, b.y)); ++by)
            for (long long bx = key1(std::min(a.x, b.x)); bx <= key1(std::max(a.x, b.x)); ++bx)
                buckets_[key(bx, by)].push_back(id);
    }
    static double seg_dist(Point p, const Seg& s) {
        const double dx = s.b.x - s.a.x, dy = s.b.y - s.a.y;
        const double L2 = dx * dx + dy * dy;
        double t = L2 > 0 ? ((p.x - s.a.x) * dx + (p.y - s.a.y) * dy) / L2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        return std::hypot(p.x - (s.a.x + t * dx), p.y - (s.a.y + t * dy));
    }
    double cell_;
    std::vector<Seg> segs_;
    std::unordered_map<long long, std::vector<int>> buckets_;
};

}  // namespace

std::vector<Point> FreeBoundary::points(int sign) const {
    const auto& v = sign > 0 ? vplus : vminus;
    std::vector<Point> out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(x.p);
    return out;
}

double FreeBoundary::length(int sign) const {
    const auto& v = sign > 0 ? vplus : vminus;
    const auto& lines = sign > 0 ? gamma_plus : gamma_minus;
    double L = 0.0;
    for (const auto& pl : lines) {
        const int n = int(pl.vid.size());
        for (int k = 0; k + 1 < n; ++k)
            L += std::hypot(v[pl.vid[k + 1]].p.x - v[pl.vid[k]].p.x, v[pl.vid[k + 1]].p.y - v[pl.vid[k]].p.y);
        if (pl.closed && n > 2)
            L += std::hypot(v[pl.vid[0]].p.x - v[pl.vid[n - 1]].p.x, v[pl.vid[0]].p.y - v[pl.vid[n - 1]].p.y);
    }
    return L;
}

FreeBoundary extract_boundaries(const ScalarField2D& u, double zero_tol) {
    const auto s = cell_signs(u, zero_tol);
    FreeBoundary fb;
    contour(u.grid(), s, 1, fb.vplus, fb.gamma_plus);
    contour(u.grid(), s, -1, fb.vminus, fb.gamma_minus);
    return fb;
}

FreeBoundary classify_points(FreeBoundary fb, double r_cls) {
    if (!(r_cls > 0)) throw DomainError("classify_points: r_cls must be positive");
    fb.r_cls = r_cls;
    fb.branch_points.clear();
    const SegmentIndex to_minus(fb.vminus, fb.gamma_minus, r_cls);
    const SegmentIndex to_plus(fb.vplus, fb.gamma_plus, r_cls);
    for (auto& v : fb.vplus) {
        v.label = to_minus.distance(v.p, r_cls) <= r_cls ? PhaseLabel::two_phase : PhaseLabel::one_phase;
        v.branch = false;
    }
    for (auto& v : fb.vminus) {
        v.label = to_plus.distance(v.p, r_cls) <= r_cls ? PhaseLabel::two_phase : PhaseLabel::one_phase;
        v.branch = false;
    }
    // Discrete closure of the one-phase set: buckets of one-phase vertices.
    std::unordered_map<long long, std::vector<Point>> one;
    auto k1 = [&](double v) { return static_cast<long long>(std::floor(v / r_cls)); };
    auto key = [](long long x, long long y) { return (x << 32) ^ (y & 0xffffffffLL); };
    for (const auto* vs : {&fb.vplus, &fb.vminus})
        for (const auto& v : *vs)
            if (v.label == PhaseLabel::one_phase) one[key(k1(v.p.x), k1(v.p.y))].push_back(v.p);
    auto near_one = [&](Point p) {
        for (long long by = k1(p.y) - 1; by <= k1(p.y) + 1; ++by)
            for (long long bx = k1(p.x) - 1; bx <= k1(p.x) + 1; ++bx) {
                auto it = one.find(key(bx, by));
                if (it == one.end()) continue;
                for (Point q : it->second)
                    if (std::hypot(p.x - q.x, p.y - q.y) <= r_cls) return true;
            }
        return false;
    };
    for (auto* vs : {&fb.vplus, &fb.vminus})
        for (auto& v : *vs)
            if (v.label == PhaseLabel::two_phase && near_one(v.p)) {
                v.branch = true;
                fb.branch_points.push_back(v.p);
            }
    return fb;
}

std::vector<Pool> find_pools(const ScalarField2D& u, double zero_tol, double min_area) {
    const Grid& g = u.grid();
    const int nx = g.nx(), ny = g.ny();
    const auto s = cell_signs(u, zero_tol);
    std::vector<int> label(s.size(), -1);
    std::vector<Pool> pools;
    std::vector<int> stack;
    const Rect& R = g.rect();
    int next = 0;
    for (int start = 0; start < int(s.size()); ++start) {
        if (s[start] != 0 || label[start] >= 0) continue;
        Pool p;
        stack.push_back(start);
        label[start] = next;
        int imin = nx, imax = -1, jmin = ny, jmax = -1;
        while (!stack.empty()) {
            const int c = stack.back();
            stack.pop_back();
            p.component_cells.push_back(c);
            const int i = c % nx, j = c / nx;
            imin = std::min(imin, i);
            imax = std::max(imax, i);
            jmin = std::min(jmin, j);
            jmax = std::max(jmax, j);
            const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
            for (const auto& q : nb) {
                if (q[0] < 0 || q[0] >= nx || q[1] < 0 || q[1] >= ny) continue;
                const int d = q[1] * nx + q[0];
                if (s[d] == 1) p.boundary_touches_plus = true;
                if (s[d] == -1) p.boundary_touches_minus = true;
                if (s[d] == 0 && label[d] < 0) {
                    label[d] = next;
                    stack.push_back(d);
                }
            }
        }
        ++next;
        p.area = double(p.component_cells.size()) * g.hx() * g.hy();
        if (p.area < min_area) continue;
        std::sort(p.component_cells.begin(), p.component_cells.end());
        p.x_min = g.x(imin);
        p.x_max = g.x(imax + 1);
        p.y_min = g.y(jmin);
        p.y_max = g.y(jmax + 1);
        p.margin_x = std::min(p.x_min - R.x_lo, R.x_hi - p.x_max);
        p.margin_y = std::min(p.y_min - R.y_lo, R.y_hi - p.y_max);
        p.margin_to_domain_boundary = std::min(p.margin_x, p.margin_y);
        pools.push_back(std::move(p));
    }
    return pools;
}

PoolBoundarySummary summarize_pool_boundary(const FreeBoundary& fb, const Pool& pool,
                                            const Grid& g) {
    PoolBoundarySummary s;
    std::vector<Point> edge;
    auto member = [&](int c) {
        return std::binary_search(pool.component_cells.begin(), pool.component_cells.end(), c);
    };
    for (int sign : {1, -1}) {
        for (const auto& v : sign > 0 ? fb.vplus : fb.vminus) {
            if (!member(v.cell_out)) continue;
            edge.push_back(v.p);
            if (v.label == PhaseLabel::two_phase) ++s.two_phase;
            if (v.label == PhaseLabel::one_phase) ++(sign > 0 ? s.one_phase_plus : s.one_phase_minus);
        }
    }
    const double reach = std::max(fb.r_cls, 2 * std::max(g.hx(), g.hy()));
    for (Point b : fb.branch_points) {
        bool near = false;
        for (Point e : edge)
            if (std::hypot(b.x - e.x, b.y - e.y) <= reach) {
                near = true;
                break;
            }
        if (near) ++(b.x < 0 ? s.branch_left : s.branch_right);
    }
    return s;
}

StripReport strip_checks(const ScalarField2D& u, const ProfileParams& p, double delta,
                         double zero_tol) {
    const Grid& g = u.grid();
    StripReport r;
    r.plus_strip_min = std::numeric_limits<double>::infinity();
    r.minus_strip_max = -std::numeric_limits<double>::infinity();
    r.min_y_positive = std::numeric_limits<double>::infinity();
    r.max_y_negative = -std::numeric_limits<double>::infinity();
    const double lo = 1 - 1.0 / 44, hi = 1 - 1.0 / 88, xmax = 3 * p.N - delta;
    const double x_flat = f_flat_unit_crossing(p);
    for (int i = 0; i <= g.nx(); ++i) {
        const double x = g.x(i);
        const double ax = std::abs(x);
        for (int j = 0; j <= g.ny(); ++j) {
            const double y = g.y(j), v = u(i, j);
            if (ax <= xmax) {
                if (y >= lo && y <= hi) r.plus_strip_min = std::min(r.plus_strip_min, v);
                if (-y >= lo && -y <= hi) r.minus_strip_max = std::max(r.minus_strip_max, v);
            }
            if (ax < p.N - 1) {
                if (v > zero_tol) r.min_y_positive = std::min(r.min_y_positive, y);
                if (v < -zero_tol) r.max_y_negative = std::max(r.max_y_negative, y);
            }
            if (ax >= x_flat && ax < xmax && std::abs(y) <= hi) {
                if (std::abs(v) <= zero_tol) {
                    r.theta = std::max(r.theta, std::abs(y));
                    ++r.zero_samples;
                } else if (j + 1 <= g.ny()) {
                    const double w = u(i, j + 1);
                    if (std::abs(w) > zero_tol && (v > 0) != (w > 0)) {
                        const double yz = y + (g.y(j + 1) - y) * v / (v - w);
                        if (std::abs(yz) <= hi) {
                            r.theta = std::max(r.theta, std::abs(yz));
                            ++r.zero_samples;
                        }
                    }
                }
            }
        }
    }
    return r;
}

double hausdorff(const std::vector<Point>& a, const std::vector<Point>& b) {
    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
    auto directed = [](const std::vector<Point>& p, const std::vector<Point>& q) {
        double h = 0.0;
        for (Point x : p) {
            double best = std::numeric_limits<double>::infinity();
            for (Point y : q) best = std::min(best, std::hypot(x.x - y.x, x.y - y.y));
            h = std::max(h, best);
        }
        return h;
    };
    return std::max(directed(a, b), directed(b, a));
}

}  // namespace fbpool
