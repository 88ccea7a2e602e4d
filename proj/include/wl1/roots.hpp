/**
 * @file roots.hpp
 * @brief Bracketed scalar root finding for increasing functions.
 */
#pragma once

#include <cmath>
#include <concepts>

#include "wl1/model.hpp"

namespace wl1 {

struct Bracket {
    double lo;
    double hi;
};

/// Grows hi by doubling until f(hi) > 0. f must be increasing with f(lo) <= 0.
template <std::invocable<double> F>
Bracket grow_bracket(F&& f, double lo, double hi, int max_doublings = 200) {
    for (int i = 0; i < max_doublings; ++i) {
        if (f(hi) > 0.0) return {lo, hi};
        lo = hi;
        hi *= 2.0;
    }
    throw NumericalError("grow_bracket: no sign change found");
}

/// Bisection on an increasing function inside [lo, hi] until the bracket is
/// narrower than xtol (absolute) or no representable midpoint remains.
template <std::invocable<double> F>
double bisect_increasing(F&& f, Bracket b, double xtol) {
    double lo = b.lo;
    double hi = b.hi;
    while (hi - lo > xtol) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        const double v = f(mid);
        if (v > 0.0)
            hi = mid;
        else if (v < 0.0)
            lo = mid;
        else
            return mid;
    }
    return lo + 0.5 * (hi - lo);
}

}  // namespace wl1
