#include "doctest.h"

#include "fbpool/kernels.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace fbpool::kernels;

namespace {

std::vector<double> randvec(std::size_t n, std::mt19937_64& rng, double zero_frac = 0.2) {
    std::normal_distribution<double> Z;
    std::uniform_real_distribution<double> U(0, 1);
    std::vector<double> v(n);
    for (double& x : v) x = U(rng) < zero_frac ? 0.0 : Z(rng);
    return v;
}

bool close(double a, double b, double rel = 1e-13) {
    return std::abs(a - b) <= rel * (1 + std::abs(a) + std::abs(b));
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("dispatch tables are complete") {
    const Dispatch& s = scalar();
    CHECK(s.isa == "scalar");
    CHECK(s.cell_row != nullptr);
    CHECK(s.axpy != nullptr);
    const Dispatch& a = active();
    CHECK((a.isa == "scalar" || a.isa == "avx2"));
    if (const Dispatch* v = avx2()) CHECK(v->isa == "avx2");
}

TEST_CASE("scalar reference values") {
    const double lo[3] = {0, 1, 3}, hi[3] = {2, 2, 2};
    CellRowSums acc;
    scalar().cell_row(lo, hi, 2, 1.0, 0.5, 0.0, nullptr, nullptr, acc);
    CHECK(acc.gx2 == 1.0 + 4.0);
    CHECK(acc.gy2 == 1.0 + 0.25);
    CHECK(acc.area_plus == 2.0);
    CHECK(acc.area_minus == 0.0);
    const double a[3] = {1, 2, 3}, b[3] = {4, 5, 6};
    CHECK(scalar().dot(a, b, 3) == 32.0);
    double y[3] = {1, 1, 1};
    scalar().axpy(2.0, a, y, 3);
    CHECK(y[2] == 7.0);
    double dsig[2];
    const double l2[3] = {0, 0, 4}, h2[3] = {0, 0, 4};
    CHECK(scalar().smoothed_area(l2, h2, 2, 1.0, dsig) == doctest::Approx(0.0 + 1.0));
    CHECK(dsig[0] == 0.0);
    CHECK(dsig[1] == 0.0);
}

TEST_CASE("AVX2 matches scalar for sizes 0..67") {
    const Dispatch* v = avx2();
    if (!v) {
        MESSAGE("AVX2 variant unavailable on this host; equivalence not exercised");
        return;
    }
    const Dispatch& s = scalar();
    std::mt19937_64 rng(31);
    for (std::size_t n = 0; n <= 67; ++n) {
        for (int rep = 0; rep < 5; ++rep) {
            const auto lo = randvec(n + 1, rng), hi = randvec(n + 1, rng);
            const auto qp = randvec(n, rng, 0.0), qm = randvec(n, rng, 0.0);
            const double zt = rep == 0 ? 0.0 : 0.05 * rep;
            for (int weighted = 0; weighted < 2; ++weighted) {
                CellRowSums a, b;
                s.cell_row(lo.data(), hi.data(), n, 3.0, 7.0, zt, weighted ? qp.data() : nullptr,
                           weighted ? qm.data() : nullptr, a);
                v->cell_row(lo.data(), hi.data(), n, 3.0, 7.0, zt, weighted ? qp.data() : nullptr,
                            weighted ? qm.data() : nullptr, b);
                CHECK(close(a.gx2, b.gx2));
                CHECK(close(a.gy2, b.gy2));
                CHECK(close(a.area_plus, b.area_plus));
                CHECK(close(a.area_minus, b.area_minus));
            }

            std::vector<double> da(n + 1, -9), db(n + 1, -9);
            const double ta = s.smoothed_area(lo.data(), hi.data(), n, 2.0, da.data());
            const double tb = v->smoothed_area(lo.data(), hi.data(), n, 2.0, db.data());
            CHECK(close(ta, tb));
            CHECK(da == db);

            // Padded rows so c[-1] and c[n] are readable.
            const auto dn = randvec(n + 2, rng), c = randvec(n + 2, rng), up = randvec(n + 2, rng);
            std::vector<double> oa(n, 0), ob(n, 0);
            s.laplace_row(dn.data() + 1, c.data() + 1, up.data() + 1, n, 1.7, 0.3, oa.data());
            v->laplace_row(dn.data() + 1, c.data() + 1, up.data() + 1, n, 1.7, 0.3, ob.data());
            for (std::size_t i = 0; i < n; ++i) CHECK(close(oa[i], ob[i]));

            const auto x = randvec(n, rng), y = randvec(n, rng);
            CHECK(close(s.dot(x.data(), y.data(), n), v->dot(x.data(), y.data(), n), 1e-12));
            auto ya = y, yb = y;
            s.axpy(-0.37, x.data(), ya.data(), n);
            v->axpy(-0.37, x.data(), yb.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(close(ya[i], yb[i]));
        }
    }
}

TEST_CASE("classification at the threshold is identical across variants") {
    const Dispatch* v = avx2();
    if (!v) return;
    // Means exactly at +-zero_tol and exactly zero.
    const std::size_t n = 13;
    std::vector<double> lo(n + 1), hi(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        lo[i] = (i % 3 == 0) ? 0.5 : (i % 3 == 1 ? -0.5 : 0.0);
        hi[i] = lo[i];
    }
    for (double zt : {0.0, 0.25, 0.5}) {
        CellRowSums a, b;
        scalar().cell_row(lo.data(), hi.data(), n, 1, 1, zt, nullptr, nullptr, a);
        v->cell_row(lo.data(), hi.data(), n, 1, 1, zt, nullptr, nullptr, b);
        CHECK(a.area_plus == b.area_plus);
        CHECK(a.area_minus == b.area_minus);
    }
}

}
