#pragma once

#include "fbpool/geometry.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fbpool {

struct ProfileParams {
    double N = 10.0;
    double alpha = 0.1;

    ProfileParams() = default;
    ProfileParams(double N, double alpha);
    Rect domain() const { return Rect(-3 * N, 3 * N, -1.0, 1.0); }
};

double f_flat(double x, const ProfileParams& p);
double f_radial(double r, const ProfileParams& p);

// |x| above which f_flat >= 1.
inline double f_flat_unit_crossing(const ProfileParams& p) {
    return (1 + 2 * p.alpha) * p.N / (1 + p.alpha);
}

struct Weights {
    std::function<double(Point)> q_plus;
    std::function<double(Point)> q_minus;
    double holder_alpha = 1.0;
    double c0 = 1.0;
    bool constant = true;
    double const_plus = 1.0;
    double const_minus = 1.0;

    static Weights unit() { return uniform(1.0, 1.0); }
    static Weights uniform(double qp, double qm);
    // Built-ins: "unit", "wavy" (1 + 0.2 sin x cos y, both phases), "split" (q+=1, q-=2).
    static Weights named(const std::string& name);
};

using ProfileFn = std::function<double(double)>;

struct BoundaryData {
    Grid grid;
    std::vector<std::uint8_t> fixed;  // 1 on boundary nodes
    std::vector<double> values;       // data on fixed nodes, 0 elsewhere
};

// Top +f(x), bottom -f(x), sides y*f(+-3N) (= 2y for the flat profile).
BoundaryData dirichlet_data(const Grid& grid, const ProfileParams& p);
BoundaryData dirichlet_data(const Grid& grid, const ProfileParams& p, const ProfileFn& f);

}  // namespace fbpool
