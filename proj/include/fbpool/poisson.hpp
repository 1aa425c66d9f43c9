#pragma once

#include "fbpool/geometry.hpp"

#include <memory>
#include <vector>

namespace fbpool {

// Exact inverse of scale * (-Laplacian_h) with homogeneous Dirichlet data on the
// interior nodes of a grid, via a 2D type-I sine transform.
class PoissonDST {
public:
    PoissonDST(const Grid& g, double scale);
    ~PoissonDST();
    PoissonDST(const PoissonDST&) = delete;
    PoissonDST& operator=(const PoissonDST&) = delete;

    // rhs and out are full node arrays; boundary entries of rhs are ignored and
    // boundary entries of out are set to zero. rhs and out may alias.
    void solve(const double* rhs, double* out);

    // out = scale * (-Laplacian_h) x on interior nodes, zero on the boundary.
    // Boundary entries of x are used as Dirichlet values.
    void apply(const double* x, double* out) const;

private:
    Grid grid_;
    double scale_;
    int mx_, my_;
    std::vector<double> inv_eig_;
    double* buf_ = nullptr;
    void* plan_ = nullptr;
};

}  // namespace fbpool
