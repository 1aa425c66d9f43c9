#pragma once
// Row kernels for the grid energy and the relaxation solvers.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The variant is chosen once at runtime from cpuid; setting the
// environment variable FBPOOL_FORCE_SCALAR=1 pins the scalar path. Both paths
// reduce in a fixed order, so results are reproducible for a given ISA.

#include <cstddef>
#include <string_view>

namespace fbpool::kernels {

struct CellRowSums {
    double gx2 = 0.0;         // sum of squared forward x-differences / hx^2
    double gy2 = 0.0;         // sum of squared forward y-differences / hy^2
    double area_plus = 0.0;   // sum of q+^2 over cells whose mean > zero_tol
    double area_minus = 0.0;  // sum of q-^2 over cells whose mean < -zero_tol
};

// Cells between node rows `lo` (row j) and `hi` (row j+1); both rows hold
// n_cells + 1 values. qp2 / qm2 are per-cell squared weights or nullptr for 1.
using CellRowFn = void (*)(const double* lo, const double* hi, std::size_t n_cells,
                           double inv_hx, double inv_hy, double zero_tol,
                           const double* qp2, const double* qm2, CellRowSums& acc);

// Smoothed measure term min(|m|/eps, 1) summed over the cells of one row;
// writes d/dm of each cell's term into dsig (length n_cells).
using SmoothedAreaFn = double (*)(const double* lo, const double* hi, std::size_t n_cells,
                                  double inv_eps, double* dsig);

// out[i] = cx*(2c[i] - c[i-1] - c[i+1]) + cy*(2c[i] - dn[i] - up[i]) for i in [0, n).
// c[-1] and c[n] must be readable.
using LaplaceRowFn = void (*)(const double* dn, const double* c, const double* up, std::size_t n,
                              double cx, double cy, double* out);

using DotFn = double (*)(const double* a, const double* b, std::size_t n);

// y += a * x
using AxpyFn = void (*)(double a, const double* x, double* y, std::size_t n);

struct Dispatch {
    std::string_view isa;
    CellRowFn cell_row;
    SmoothedAreaFn smoothed_area;
    LaplaceRowFn laplace_row;
    DotFn dot;
    AxpyFn axpy;
};

const Dispatch& scalar();

// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const Dispatch* avx2();

// The table used by the library.
const Dispatch& active();

namespace detail {
extern const Dispatch kScalar;
#if defined(FBPOOL_HAVE_AVX2)
extern const Dispatch kAvx2;
#endif
}  // namespace detail

}  // namespace fbpool::kernels
