#pragma once

#include "fbpool/boundary.hpp"
#include "fbpool/geometry.hpp"

#include <cstdint>
#include <vector>

namespace fbpool {

enum class PhaseLabel : std::uint8_t { unclassified, one_phase, two_phase };

struct FbVertex {
    Point p;
    int cell_in = -1;   // linear index of the adjacent cell of this phase
    int cell_out = -1;  // linear index of the adjacent cell outside this phase
    PhaseLabel label = PhaseLabel::unclassified;
    bool branch = false;
};

struct Polyline {
    std::vector<int> vid;  // indices into the owning vertex list
    bool closed = false;
};

struct FreeBoundary {
    std::vector<FbVertex> vplus, vminus;
    std::vector<Polyline> gamma_plus, gamma_minus;
    std::vector<Point> branch_points;
    double r_cls = 0.0;

    std::vector<Point> points(int sign) const;
    double length(int sign) const;
};

// Contours of {cell mean > zero_tol} and {cell mean < -zero_tol} on the grid of cell centres.
FreeBoundary extract_boundaries(const ScalarField2D& u, double zero_tol);

FreeBoundary classify_points(FreeBoundary fb, double r_cls);

struct Pool {
    std::vector<int> component_cells;  // linear cell indices j * nx + i
    double area = 0.0;
    bool boundary_touches_plus = false;
    bool boundary_touches_minus = false;
    double margin_to_domain_boundary = 0.0;
    double margin_x = 0.0;  // to the side walls
    double margin_y = 0.0;  // to top and bottom
    double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;  // closure extent
};

std::vector<Pool> find_pools(const ScalarField2D& u, double zero_tol, double min_area);

// What the classified free boundary looks like along one pool's edge.
struct PoolBoundarySummary {
    int one_phase_plus = 0;
    int one_phase_minus = 0;
    int two_phase = 0;
    int branch_left = 0;   // branch points with x < 0 near the pool
    int branch_right = 0;  // branch points with x > 0 near the pool
};
PoolBoundarySummary summarize_pool_boundary(const FreeBoundary& fb, const Pool& pool,
                                            const Grid& g);

struct StripReport {
    double plus_strip_min = 0.0;   // min u over the upper strip
    double minus_strip_max = 0.0;  // max u over the lower strip
    double min_y_positive = 0.0;   // lowest y with u > 0 for |x| < N - 1
    double max_y_negative = 0.0;   // highest y with u < 0 for |x| < N - 1
    double theta = 0.0;            // max |y| of zeros where f >= 1
    int zero_samples = 0;
};

StripReport strip_checks(const ScalarField2D& u, const ProfileParams& p, double delta,
                         double zero_tol);

// Symmetric Hausdorff distance between point sets; infinity if exactly one is empty.
double hausdorff(const std::vector<Point>& a, const std::vector<Point>& b);

}  // namespace fbpool
