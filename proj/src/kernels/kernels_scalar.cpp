#include "fbpool/kernels.hpp"

#include <cmath>

namespace fbpool::kernels {
namespace {

void cell_row_scalar(const double* lo, const double* hi, std::size_t n, double inv_hx,
                     double inv_hy, double zero_tol, const double* qp2, const double* qm2,
                     CellRowSums& acc) {
    double gx2 = 0.0, gy2 = 0.0, ap = 0.0, am = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double gx = (lo[i + 1] - lo[i]) * inv_hx;
        const double gy = (hi[i] - lo[i]) * inv_hy;
        gx2 += gx * gx;
        gy2 += gy * gy;
        const double m = 0.25 * ((lo[i] + lo[i + 1]) + (hi[i] + hi[i + 1]));
        if (m > zero_tol) {
            ap += qp2 ? qp2[i] : 1.0;
        } else if (m < -zero_tol) {
            am += qm2 ? qm2[i] : 1.0;
        }
    }
    acc.gx2 += gx2;
    acc.gy2 += gy2;
    acc.area_plus += ap;
    acc.area_minus += am;
}

double smoothed_area_scalar(const double* lo, const double* hi, std::size_t n, double inv_eps,
                            double* dsig) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = 0.25 * ((lo[i] + lo[i + 1]) + (hi[i] + hi[i + 1]));
        const double s = std::abs(m) * inv_eps;
        if (s < 1.0) {
            total += s;
            dsig[i] = m > 0.0 ? inv_eps : (m < 0.0 ? -inv_eps : 0.0);
        } else {
            total += 1.0;
            dsig[i] = 0.0;
        }
    }
    return total;
}

void laplace_row_scalar(const double* dn, const double* c, const double* up, std::size_t n,
                        double cx, double cy, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double two_c = 2.0 * c[i];
        out[i] = cx * (two_c - c[i - 1] - c[i + 1]) + cy * (two_c - dn[i] - up[i]);
    }
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace

namespace detail {
const Dispatch kScalar{"scalar", cell_row_scalar, smoothed_area_scalar, laplace_row_scalar,
                       dot_scalar, axpy_scalar};
}

}  // namespace fbpool::kernels
