#include "fbpool/boundary.hpp"

#include "fbpool/errors.hpp"

#include <algorithm>
#include <cmath>

namespace fbpool {

ProfileParams::ProfileParams(double N, double alpha) : N(N), alpha(alpha) {
    if (!(N >= 1.0)) throw DomainError("ProfileParams: N must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("ProfileParams: alpha must lie in (0,1)");
}

double f_flat(double x, const ProfileParams& p) {
    const double ax = std::abs(x);
    if (ax > 3 * p.N * (1 + 1e-12)) throw DomainError("f_flat: |x| > 3N");
    if (ax <= p.N) return 1 - p.alpha;
    if (ax <= 2 * p.N) return ax * (1 + p.alpha) / p.N - 2 * p.alpha;
    return 2.0;
}

double f_radial(double r, const ProfileParams& p) {
    if (r < 0 || r > 3 * p.N * (1 + 1e-12)) throw DomainError("f_radial: r outside [0, 3N]");
    if (r <= 1) return 1 - p.alpha;
    if (r <= 2 * p.N) return (std::log(r) / std::log(2 * p.N) + 1) * (1 + p.alpha) - 2 * p.alpha;
    return 2.0;
}

Weights Weights::uniform(double qp, double qm) {
    if (!(qp > 0 && qm > 0)) throw DomainError("weights must be positive");
    Weights w;
    w.q_plus = [qp](Point) { return qp; };
    w.q_minus = [qm](Point) { return qm; };
    w.constant = true;
    w.const_plus = qp;
    w.const_minus = qm;
    w.holder_alpha = 1.0;
    w.c0 = std::min({qp, qm, 1 / qp, 1 / qm});
    return w;
}

Weights Weights::named(const std::string& name) {
    if (name == "unit") return unit();
    if (name == "split") return uniform(1.0, 2.0);
    if (name == "wavy") {
        Weights w;
        auto q = [](Point p) { return 1.0 + 0.2 * std::sin(p.x) * std::cos(p.y); };
        w.q_plus = q;
        w.q_minus = q;
        w.constant = false;
        w.holder_alpha = 1.0;
        w.c0 = 0.8;
        return w;
    }
    throw DomainError("unknown weight set '" + name + "'");
}

BoundaryData dirichlet_data(const Grid& grid, const ProfileParams& p) {
    return dirichlet_data(grid, p, [p](double x) { return f_flat(x, p); });
}

BoundaryData dirichlet_data(const Grid& grid, const ProfileParams& p, const ProfileFn& f) {
    const Rect& r = grid.rect();
    const Rect d = p.domain();
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * (1 + std::abs(b)); };
    if (!close(r.x_lo, d.x_lo) || !close(r.x_hi, d.x_hi) || !close(r.y_lo, d.y_lo) ||
        !close(r.y_hi, d.y_hi))
        throw DomainError("dirichlet_data: grid rect must be [-3N,3N]x[-1,1]");
    BoundaryData b{grid, std::vector<std::uint8_t>(grid.node_count(), 0),
                   std::vector<double>(grid.node_count(), 0.0)};
    const int nx = grid.nx(), ny = grid.ny();
    const double fl = f(r.x_lo), fr = f(r.x_hi);
    for (int j = 0; j <= ny; ++j) {
        const double y = grid.y(j);
        b.fixed[grid.index(0, j)] = 1;
        b.values[grid.index(0, j)] = y * fl;
        b.fixed[grid.index(nx, j)] = 1;
        b.values[grid.index(nx, j)] = y * fr;
    }
    for (int i = 1; i < nx; ++i) {
        const double fx = f(grid.x(i));
        b.fixed[grid.index(i, ny)] = 1;
        b.values[grid.index(i, ny)] = fx;
        b.fixed[grid.index(i, 0)] = 1;
        b.values[grid.index(i, 0)] = -fx;
    }
    return b;
}

}  // namespace fbpool
