#pragma once

#include <vector>

namespace fbpool {

struct SliceSolution {
    double f = 0.0;
    double a = 0.0;
    double b = 0.0;
    double energy = 0.0;

    // Minimizer value at height y in [-1, 1].
    double eval(double y) const;
};

// Samples on the uniform grid y_k = -1 + 2k/(m-1), k = 0..m-1.
struct SliceProfile {
    std::vector<double> samples;

    int m() const { return int(samples.size()); }
    double y(int k) const { return -1.0 + 2.0 * k / (m() - 1); }
    template <class F>
    static SliceProfile sample(int m, F&& fn) {
        SliceProfile p;
        p.samples.resize(m);
        for (int k = 0; k < m; ++k) p.samples[k] = fn(-1.0 + 2.0 * k / (m - 1));
        return p;
    }
};

SliceSolution slice_minimize(double f);

// Forward-difference Dirichlet term plus the total width of cells with an endpoint
// exceeding zero_tol in absolute value.
double slice_energy(const SliceProfile& profile, double zero_tol = 0.0);

// G(a, b) = f^2/(1-b) + f^2/(a+1) + 2 - (b-a): energy of the best profile whose
// zero set is [a, b].
double slice_G(double f, double a, double b);

// Grid minimization of G over a <= b on the points -1 + (k + 1/2)(2/n).
SliceSolution slice_oracle(double f, int grid_n);

double energy_lower_bound_small_u(double f, double delta, double eps);

double eta_lower_bound(double alpha, double beta);

// Lower bound on the slice energy at f = 1 - alpha when the zero set has measure delta.
double zero_set_energy_bound(double alpha, double delta);

struct StabilityResult {
    bool ok = false;
    double sup_distance = 0.0;
    double excess = 0.0;
};

// Throws PreconditionError when the profile's energy exceeds the minimum by more than eps.
StabilityResult linf_stability_check(const SliceProfile& profile, double f, double eps, double C);

// Exact minimum of the slice energy over piecewise-linear profiles with `knots`
// uniform intervals and values on `levels` equally spaced points of [-f, f],
// forced through value `value` at knot `knot`. Dynamic programming, O(knots * levels^2).
double slice_constrained_min(double f, int knots, int levels, int knot, double value);

}  // namespace fbpool
