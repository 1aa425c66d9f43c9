// Compiled with -mavx2 -mfma; only reached after a cpuid check.
#include "fbpool/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace fbpool::kernels {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void cell_row_avx2(const double* lo, const double* hi, std::size_t n, double inv_hx,
                   double inv_hy, double zero_tol, const double* qp2, const double* qm2,
                   CellRowSums& acc) {
    const __m256d vhx = _mm256_set1_pd(inv_hx);
    const __m256d vhy = _mm256_set1_pd(inv_hy);
    const __m256d vq = _mm256_set1_pd(0.25);
    const __m256d vtp = _mm256_set1_pd(zero_tol);
    const __m256d vtm = _mm256_set1_pd(-zero_tol);
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d sx = _mm256_setzero_pd(), sy = _mm256_setzero_pd();
    __m256d sp = _mm256_setzero_pd(), sm = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d l0 = _mm256_loadu_pd(lo + i);
        const __m256d l1 = _mm256_loadu_pd(lo + i + 1);
        const __m256d h0 = _mm256_loadu_pd(hi + i);
        const __m256d h1 = _mm256_loadu_pd(hi + i + 1);
        const __m256d gx = _mm256_mul_pd(_mm256_sub_pd(l1, l0), vhx);
        const __m256d gy = _mm256_mul_pd(_mm256_sub_pd(h0, l0), vhy);
        sx = _mm256_fmadd_pd(gx, gx, sx);
        sy = _mm256_fmadd_pd(gy, gy, sy);
        const __m256d m =
            _mm256_mul_pd(_mm256_add_pd(_mm256_add_pd(l0, l1), _mm256_add_pd(h0, h1)), vq);
        const __m256d pos = _mm256_cmp_pd(m, vtp, _CMP_GT_OQ);
        const __m256d neg = _mm256_cmp_pd(m, vtm, _CMP_LT_OQ);
        const __m256d wp = qp2 ? _mm256_loadu_pd(qp2 + i) : one;
        const __m256d wm = qm2 ? _mm256_loadu_pd(qm2 + i) : one;
        sp = _mm256_add_pd(sp, _mm256_and_pd(pos, wp));
        sm = _mm256_add_pd(sm, _mm256_and_pd(neg, wm));
    }
    double gx2 = hsum(sx), gy2 = hsum(sy), ap = hsum(sp), am = hsum(sm);
    for (; i < n; ++i) {
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

double smoothed_area_avx2(const double* lo, const double* hi, std::size_t n, double inv_eps,
                          double* dsig) {
    const __m256d vq = _mm256_set1_pd(0.25);
    const __m256d ve = _mm256_set1_pd(inv_eps);
    const __m256d vne = _mm256_set1_pd(-inv_eps);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d tot = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d l0 = _mm256_loadu_pd(lo + i);
        const __m256d l1 = _mm256_loadu_pd(lo + i + 1);
        const __m256d h0 = _mm256_loadu_pd(hi + i);
        const __m256d h1 = _mm256_loadu_pd(hi + i + 1);
        const __m256d m =
            _mm256_mul_pd(_mm256_add_pd(_mm256_add_pd(l0, l1), _mm256_add_pd(h0, h1)), vq);
        const __m256d s = _mm256_mul_pd(_mm256_and_pd(m, absmask), ve);
        const __m256d inside = _mm256_cmp_pd(s, one, _CMP_LT_OQ);
        tot = _mm256_add_pd(tot, _mm256_min_pd(s, one));
        const __m256d d = _mm256_or_pd(_mm256_and_pd(_mm256_cmp_pd(m, zero, _CMP_GT_OQ), ve),
                                       _mm256_and_pd(_mm256_cmp_pd(m, zero, _CMP_LT_OQ), vne));
        _mm256_storeu_pd(dsig + i, _mm256_and_pd(inside, d));
    }
    double total = hsum(tot);
    for (; i < n; ++i) {
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

void laplace_row_avx2(const double* dn, const double* c, const double* up, std::size_t n,
                      double cx, double cy, double* out) {
    const __m256d vcx = _mm256_set1_pd(cx);
    const __m256d vcy = _mm256_set1_pd(cy);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d cc = _mm256_loadu_pd(c + i);
        const __m256d cl = _mm256_loadu_pd(c + i - 1);
        const __m256d cr = _mm256_loadu_pd(c + i + 1);
        const __m256d d = _mm256_loadu_pd(dn + i);
        const __m256d u = _mm256_loadu_pd(up + i);
        const __m256d two_c = _mm256_add_pd(cc, cc);
        const __m256d ex = _mm256_sub_pd(_mm256_sub_pd(two_c, cl), cr);
        const __m256d ey = _mm256_sub_pd(_mm256_sub_pd(two_c, d), u);
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_mul_pd(vcx, ex), _mm256_mul_pd(vcy, ey)));
    }
    for (; i < n; ++i) {
        const double two_c = 2.0 * c[i];
        out[i] = cx * (two_c - c[i - 1] - c[i + 1]) + cy * (two_c - dn[i] - up[i]);
    }
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
        s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
    }
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

}  // namespace

namespace detail {
const Dispatch kAvx2{"avx2", cell_row_avx2, smoothed_area_avx2, laplace_row_avx2, dot_avx2,
                     axpy_avx2};
}

}  // namespace fbpool::kernels
