#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

namespace sslab {

// Solve f(x) = 0 for a continuous strictly monotone f on [lo, hi] with a sign
// change. The callback returns (value, derivative). Strategy: bisection down
// to an interval width of 1e-8 (scaled), then Newton polishing to a relative
// tolerance of 1e-13, falling back to bisection whenever a Newton step leaves
// the bracket.
inline double solve_monotone(const std::function<std::pair<double, double>(double)>& f,
                             double lo, double hi) {
    auto [flo, dlo] = f(lo);
    auto [fhi, dhi] = f(hi);
    (void)dlo;
    (void)dhi;
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::domain_error("solve_monotone: no sign change on the bracket");

    const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
    while (hi - lo > 1e-8 * scale) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid).first;
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }

    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 60; ++it) {
        auto [fx, dfx] = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0.0) == (flo > 0.0))
            lo = x;
        else
            hi = x;
        double step = (dfx != 0.0) ? fx / dfx : 0.0;
        double xn = x - step;
        if (step == 0.0 || xn <= lo || xn >= hi) xn = 0.5 * (lo + hi);
        if (std::abs(xn - x) <= 1e-13 * std::max(1.0, std::abs(xn))) return xn;
        x = xn;
    }
    return x;
}

}  // namespace sslab
