#include "fbpool/energy.hpp"

#include "fbpool/errors.hpp"
#include "fbpool/kernels.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>

namespace fbpool {

namespace {

kernels::CellRowSums accumulate(const ScalarField2D& u, const Weights& w, const CellRange& c,
                                double zero_tol) {
    const Grid& g = u.grid();
    const auto& k = kernels::active();
    const std::size_t n = std::size_t(c.i1 - c.i0);
    const bool weighted = !w.constant;
    std::vector<double> qp2, qm2;
    if (weighted) {
        qp2.resize(n);
        qm2.resize(n);
    }
    kernels::CellRowSums acc;
    for (int j = c.j0; j < c.j1; ++j) {
        if (weighted) {
            for (int i = c.i0; i < c.i1; ++i) {
                const Point p = g.cell_center(i, j);
                const double a = w.q_plus(p), b = w.q_minus(p);
                qp2[i - c.i0] = a * a;
                qm2[i - c.i0] = b * b;
            }
        }
        k.cell_row(u.data() + g.index(c.i0, j), u.data() + g.index(c.i0, j + 1), n, 1.0 / g.hx(),
                   1.0 / g.hy(), zero_tol, weighted ? qp2.data() : nullptr,
                   weighted ? qm2.data() : nullptr, acc);
    }
    return acc;
}

}  // namespace

EnergyReport energy_J(const ScalarField2D& u, const Weights& w, const CellRange& c,
                      double zero_tol) {
    const Grid& g = u.grid();
    if (c.i0 < 0 || c.j0 < 0 || c.i1 > g.nx() || c.j1 > g.ny() || c.i0 >= c.i1 || c.j0 >= c.j1)
        throw AlignmentError("cell range outside grid");
    const kernels::CellRowSums s = accumulate(u, w, c, zero_tol);
    const double cell = g.hx() * g.hy();
    EnergyReport r;
    r.dx_part = s.gx2 * cell;
    const double dy = s.gy2 * cell;
    r.dirichlet = (s.gx2 + s.gy2) * cell;
    const double sp = w.constant ? w.const_plus * w.const_plus : 1.0;
    const double sm = w.constant ? w.const_minus * w.const_minus : 1.0;
    r.area_plus = s.area_plus * sp * cell;
    r.area_minus = s.area_minus * sm * cell;
    r.total = r.dirichlet + r.area_plus + r.area_minus;
    r.sliced_total = dy + r.area_plus + r.area_minus;
    return r;
}

EnergyReport energy_J(const ScalarField2D& u, const Weights& w, const Rect& sub, double zero_tol) {
    return energy_J(u, w, cell_range(u.grid(), sub), zero_tol);
}

EnergyReport energy_J(const ScalarField2D& u, const Weights& w, double zero_tol) {
    return energy_J(u, w, CellRange{0, u.grid().nx(), 0, u.grid().ny()}, zero_tol);
}

double sliced_energy_S(const ScalarField2D& u, const Rect& sub, double zero_tol) {
    return energy_J(u, Weights::unit(), sub, zero_tol).sliced_total;
}

double dx_energy(const ScalarField2D& u, const Rect& sub) {
    return energy_J(u, Weights::unit(), sub, 0.0).dx_part;
}

double energy_on_cells(const Grid& g, const double* v, const Weights& w,
                       const std::vector<std::pair<int, int>>& cells, double zero_tol) {
    const double cell = g.hx() * g.hy();
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
    double e = 0.0;
    for (auto [i, j] : cells) {
        const double a = v[g.index(i, j)], b = v[g.index(i + 1, j)];
        const double c = v[g.index(i, j + 1)], d = v[g.index(i + 1, j + 1)];
        const double gx = (b - a) * ihx, gy = (c - a) * ihy;
        double t = gx * gx + gy * gy;
        const double m = 0.25 * ((a + b) + (c + d));
        if (m > zero_tol) {
            const double q = w.constant ? w.const_plus : w.q_plus(g.cell_center(i, j));
            t += q * q;
        } else if (m < -zero_tol) {
            const double q = w.constant ? w.const_minus : w.q_minus(g.cell_center(i, j));
            t += q * q;
        }
        e += t * cell;
    }
    return e;
}

double energy_on_cells(const ScalarField2D& u, const Weights& w,
                       const std::vector<std::pair<int, int>>& cells, double zero_tol) {
    return energy_on_cells(u.grid(), u.data(), w, cells, zero_tol);
}

double weiss(const ScalarField2D& u, const Weights& w, Point x0, double r, double zero_tol) {
    const Grid& g = u.grid();
    const Rect& R = g.rect();
    if (r < 4 * std::max(g.hx(), g.hy())) throw DomainError("weiss: radius below 4 grid steps");
    if (x0.x - r < R.x_lo || x0.x + r > R.x_hi || x0.y - r < R.y_lo || x0.y + r > R.y_hi)
        throw DomainError("weiss: ball exceeds the field domain");
    const double hx = g.hx(), hy = g.hy();
    const int i0 = std::max(0, int(std::floor((x0.x - r - R.x_lo) / hx)) - 1);
    const int i1 = std::min(g.nx(), int(std::ceil((x0.x + r - R.x_lo) / hx)) + 1);
    const int j0 = std::max(0, int(std::floor((x0.y - r - R.y_lo) / hy)) - 1);
    const int j1 = std::min(g.ny(), int(std::ceil((x0.y + r - R.y_lo) / hy)) + 1);
    const double r2 = r * r;
    auto inside = [&](double x, double y) {
        const double dx = x - x0.x, dy = y - x0.y;
        return dx * dx + dy * dy <= r2;
    };
    double vol = 0.0;
    for (int j = j0; j < j1; ++j) {
        for (int i = i0; i < i1; ++i) {
            const double xa = g.x(i), ya = g.y(j), xb = xa + hx, yb = ya + hy;
            const int corners = inside(xa, ya) + inside(xb, ya) + inside(xa, yb) + inside(xb, yb);
            // Nearest point of the cell to the centre decides whether it can meet the disk.
            const double nx = std::clamp(x0.x, xa, xb) - x0.x, ny = std::clamp(x0.y, ya, yb) - x0.y;
            if (corners == 0 && nx * nx + ny * ny > r2) continue;
            double cover = 1.0;
            if (corners != 4) {
                constexpr int kSub = 16;
                int hits = 0;
                for (int b = 0; b < kSub; ++b)
                    for (int a = 0; a < kSub; ++a)
                        hits += inside(xa + (a + 0.5) * hx / kSub, ya + (b + 0.5) * hy / kSub);
                cover = hits / double(kSub * kSub);
                if (hits == 0) continue;
            }
            const auto gr = gradient(u, i, j);
            double c = gr[0] * gr[0] + gr[1] * gr[1];
            const int s = cell_sign(u, i, j, zero_tol);
            if (s != 0) {
                const Point p = g.cell_center(i, j);
                const double q = s > 0 ? w.q_plus(p) : w.q_minus(p);
                c += q * q;
            }
            vol += c * cover * hx * hy;
        }
    }
    constexpr int kCircle = 256;
    double bnd = 0.0;
    for (int k = 0; k < kCircle; ++k) {
        const double th = 2 * std::numbers::pi * k / kCircle;
        const double v = u.interpolate({x0.x + r * std::cos(th), x0.y + r * std::sin(th)});
        bnd += v * v;
    }
    bnd *= 2 * std::numbers::pi * r / kCircle;
    return vol / r2 - bnd / (r2 * r);
}

double lipschitz_estimate(const ScalarField2D& u, const Rect& sub) {
    const Grid& g = u.grid();
    const CellRange c = cell_range(g, sub);
    if (c.i0 < 2 || c.j0 < 2 || c.i1 > g.nx() - 2 || c.j1 > g.ny() - 2)
        throw DomainError("lipschitz_estimate: sub must keep a 2-cell margin from the boundary");
    double L = 0.0;
    for (int j = c.j0; j < c.j1; ++j)
        for (int i = c.i0; i < c.i1; ++i) {
            const auto gr = gradient(u, i, j);
            L = std::max(L, std::hypot(gr[0], gr[1]));
        }
    return L;
}

double default_zero_tol(const ScalarField2D& u) { return 64 * DBL_EPSILON * u.max_abs(); }

}  // namespace fbpool
