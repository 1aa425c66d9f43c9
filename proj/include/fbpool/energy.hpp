#pragma once

#include "fbpool/boundary.hpp"
#include "fbpool/geometry.hpp"

#include <utility>
#include <vector>

namespace fbpool {

struct EnergyReport {
    double dirichlet = 0.0;
    double area_plus = 0.0;   // q+^2-weighted
    double area_minus = 0.0;  // q-^2-weighted
    double total = 0.0;
    double sliced_total = 0.0;  // y-derivative only, same area terms
    double dx_part = 0.0;
};

EnergyReport energy_J(const ScalarField2D& u, const Weights& w, const Rect& sub, double zero_tol);
EnergyReport energy_J(const ScalarField2D& u, const Weights& w, double zero_tol);
EnergyReport energy_J(const ScalarField2D& u, const Weights& w, const CellRange& cells,
                      double zero_tol);

double sliced_energy_S(const ScalarField2D& u, const Rect& sub, double zero_tol);
double dx_energy(const ScalarField2D& u, const Rect& sub);

// Energy restricted to an explicit list of cells (i, j).
double energy_on_cells(const ScalarField2D& u, const Weights& w,
                       const std::vector<std::pair<int, int>>& cells, double zero_tol);
double energy_on_cells(const Grid& g, const double* values, const Weights& w,
                       const std::vector<std::pair<int, int>>& cells, double zero_tol);

// Two-dimensional Weiss functional: (1/r^2) * volume energy in B(x0, r) minus (1/r^3) * int u^2
// over the circle.
double weiss(const ScalarField2D& u, const Weights& w, Point x0, double r, double zero_tol);

double lipschitz_estimate(const ScalarField2D& u, const Rect& sub);

// Cell sign by nodal mean: +1, -1 or 0.
inline int cell_sign(const ScalarField2D& u, int i, int j, double zero_tol) {
    const double m = 0.25 * ((u(i, j) + u(i + 1, j)) + (u(i, j + 1) + u(i + 1, j + 1)));
    return m > zero_tol ? 1 : (m < -zero_tol ? -1 : 0);
}

// Machine-precision zero tolerance for solver output.
double default_zero_tol(const ScalarField2D& u);

}  // namespace fbpool
