#include "fbpool/slice1d.hpp"

#include "fbpool/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fbpool {

double SliceSolution::eval(double y) const {
    if (f >= 1.0) return y * f;
    const double t = std::abs(y) - 1.0 + f;
    if (t <= 0.0) return 0.0;
    return y > 0 ? t : -t;
}

SliceSolution slice_minimize(double f) {
    if (!(f >= 0.0)) throw DomainError("slice_minimize: f must be nonnegative");
    if (f >= 1.0) return {f, 0.0, 0.0, 2 * f * f + 2};
    return {f, f - 1.0, 1.0 - f, 4 * f};
}

double slice_energy(const SliceProfile& p, double zero_tol) {
    const int m = p.m();
    if (m < 2) throw DomainError("slice_energy: need at least 2 samples");
    const double h = 2.0 / (m - 1);
    double dir = 0.0, meas = 0.0;
    for (int k = 0; k + 1 < m; ++k) {
        const double d = p.samples[k + 1] - p.samples[k];
        dir += d * d;
        if (std::abs(p.samples[k]) > zero_tol || std::abs(p.samples[k + 1]) > zero_tol) meas += h;
    }
    return dir / h + meas;
}

double slice_G(double f, double a, double b) {
    return f * f / (1 - b) + f * f / (a + 1) + 2 - (b - a);
}

SliceSolution slice_oracle(double f, int grid_n) {
    if (grid_n < 100) throw DomainError("slice_oracle: grid_n must be >= 100");
    if (!(f >= 0.0)) throw DomainError("slice_oracle: f must be nonnegative");
    const double step = 2.0 / grid_n;
    std::vector<double> t(grid_n);
    for (int k = 0; k < grid_n; ++k) t[k] = -1.0 + (k + 0.5) * step;
    // G = A(a) + B(b) + 2, so a running minimum of B over b >= a gives the exact grid minimum.
    const double f2 = f * f;
    double best = std::numeric_limits<double>::infinity();
    int best_a = 0, best_b = 0;
    double bmin = std::numeric_limits<double>::infinity();
    int bmin_k = grid_n - 1;
    for (int k = grid_n - 1; k >= 0; --k) {
        const double B = f2 / (1 - t[k]) - t[k];
        if (B < bmin) {
            bmin = B;
            bmin_k = k;
        }
        const double A = f2 / (t[k] + 1) + t[k];
        const double G = A + bmin + 2;
        if (G < best) {
            best = G;
            best_a = k;
            best_b = bmin_k;
        }
    }
    return {f, t[best_a], t[best_b], best};
}

double energy_lower_bound_small_u(double f, double delta, double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("energy_lower_bound_small_u: eps outside (0,1]");
    if (!(delta >= 0.0)) throw DomainError("energy_lower_bound_small_u: delta must be >= 0");
    if (!(delta < f)) throw DomainError("energy_lower_bound_small_u: delta must be < f");
    return (f - delta) * (f - delta) / eps;
}

double eta_lower_bound(double alpha, double beta) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("eta_lower_bound: alpha outside (0,1)");
    if (!(beta >= 0.0)) throw DomainError("eta_lower_bound: beta must be >= 0");
    const double a2 = alpha * alpha;
    return std::min({4 * beta, a2 / 2, a2 / 1e4});
}

double zero_set_energy_bound(double alpha, double delta) {
    if (!(delta >= 0.0 && delta < 2.0)) throw DomainError("zero_set_energy_bound: delta outside [0,2)");
    return 4 * (1 - alpha) + (delta - 2 * alpha) * (delta - 2 * alpha) / (2 - delta);
}

StabilityResult linf_stability_check(const SliceProfile& p, double f, double eps, double C) {
    if (!(f >= 1.0)) throw DomainError("linf_stability_check: requires f >= 1");
    if (p.m() < 2) throw DomainError("linf_stability_check: need at least 2 samples");
    const double tol = 1e-12 * (1 + f);
    if (std::abs(p.samples.front() + f) > tol || std::abs(p.samples.back() - f) > tol)
        throw DomainError("linf_stability_check: endpoints must equal -f and f");
    StabilityResult r;
    r.excess = slice_energy(p, 0.0) - slice_minimize(f).energy;
    if (r.excess > eps)
        throw PreconditionError("energy excess " + std::to_string(r.excess) + " exceeds eps",
                                r.excess);
    for (int k = 0; k < p.m(); ++k)
        r.sup_distance = std::max(r.sup_distance, std::abs(p.samples[k] - p.y(k) * f));
    r.ok = r.sup_distance <= C * std::sqrt(eps);
    return r;
}

double slice_constrained_min(double f, int knots, int levels, int knot, double value) {
    if (knots < 2 || levels < 3 || knot < 0 || knot > knots)
        throw DomainError("slice_constrained_min: bad lattice");
    const double h = 2.0 / knots;
    std::vector<double> v(levels);
    for (int l = 0; l < levels; ++l) v[l] = f * double(2 * l - (levels - 1)) / (levels - 1);
    auto nearest = [&](double x) {
        int best = 0;
        for (int l = 1; l < levels; ++l)
            if (std::abs(v[l] - x) < std::abs(v[best] - x)) best = l;
        return best;
    };
    const int l_start = 0, l_end = levels - 1, l_pin = nearest(value);
    if (std::abs(v[l_pin] - value) > 1e-12 * (1 + f))
        throw DomainError("slice_constrained_min: pinned value not on the lattice");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> cost(levels, inf), next(levels);
    cost[l_start] = 0.0;
    if (knot == 0 && l_pin != l_start) return inf;
    for (int k = 1; k <= knots; ++k) {
        std::fill(next.begin(), next.end(), inf);
        for (int l = 0; l < levels; ++l) {
            if (k == knots && l != l_end) continue;
            if (k == knot && l != l_pin) continue;
            double best = inf;
            for (int p = 0; p < levels; ++p) {
                if (cost[p] == inf) continue;
                const double d = v[l] - v[p];
                const bool nz = v[l] != 0.0 || v[p] != 0.0;
                best = std::min(best, cost[p] + d * d / h + (nz ? h : 0.0));
            }
            next[l] = best;
        }
        cost.swap(next);
    }
    return cost[l_end];
}

}  // namespace fbpool
