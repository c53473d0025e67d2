#pragma once

#include <cmath>
#include <functional>

#include "smp/errors.hpp"

namespace smp {

namespace detail {

template <class F>
double simpson_step(const F& f, double a, double fa, double b, double fb, double m, double fm,
                    double whole, double rel_tol, double abs_tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * (abs_tol + rel_tol * std::abs(left + right)))
        return left + right + delta / 15.0;
    return simpson_step(f, a, fa, m, fm, lm, flm, left, rel_tol, 0.5 * abs_tol, depth - 1) +
           simpson_step(f, m, fm, b, fb, rm, frm, right, rel_tol, 0.5 * abs_tol, depth - 1);
}

} // namespace detail

/// Adaptive Simpson on [a,b].  The integrand must be finite on the closed
/// interval; improper endpoints are the caller's job (shrink the interval).
template <class F>
double adaptive_simpson(const F& f, double a, double b, double rel_tol = 1e-12,
                        double abs_tol = 1e-300, int max_depth = 48) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm))
        throw numeric_error("adaptive_simpson: non-finite integrand");
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_step(f, a, fa, b, fb, m, fm, whole, rel_tol, abs_tol, max_depth);
}

/// Monotone bisection: smallest x in [lo,hi] with pred(x) true, assuming
/// pred(lo) false, pred(hi) true and pred monotone along the interval.
template <class P>
double bisect_boundary(const P& pred, double lo, double hi, double tol) {
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break; // float resolution floor
        if (pred(mid))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace smp
