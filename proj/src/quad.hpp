#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace fbpool::detail {

// Adaptive GK31 on [a, b] through the reference interval. Boost compares the unscaled
// reference-interval error with a scaled tolerance, so short intervals passed directly
// would never meet it.
template <class F>
double gk31(F&& f, double a, double b, unsigned depth, double tol) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    if (half == 0.0) return 0.0;
    return half * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                      [&](double u) { return f(mid + half * u); }, -1.0, 1.0, depth, tol);
}

}  // namespace fbpool::detail
