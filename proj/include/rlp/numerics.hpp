#pragma once
// Small numeric kernels shared across modules: adaptive Simpson quadrature
// with kink-aware panels, and bracketed bisection.

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace rlp {

namespace detail {

template <class F>
double simpson_rec(const F& f, double a, double fa, double b, double fb,
                   double m, double fm, double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double err = left + right - whole;
    if (depth <= 0 || std::abs(err) <= 15.0 * tol)
        return left + right + err / 15.0;
    return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson on [a, b], absolute tolerance tol, max recursion depth.
template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-10, int max_depth = 40) {
    if (!(b > a)) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fb = f(b), fm = f(m);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

// Same, with interior breakpoints placed on panel boundaries so kinks of the
// integrand never sit inside a panel.
template <class F>
double integrate_split(const F& f, double a, double b, std::span<const double> kinks,
                       double tol = 1e-10, int max_depth = 40) {
    if (!(b > a)) return 0.0;
    std::vector<double> pts{a};
    for (double k : kinks)
        if (k > a && k < b) pts.push_back(k);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    double total = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i)
        total += integrate(f, pts[i], pts[i + 1], tol, max_depth);
    return total;
}

// Bisection on a bracketing interval [lo, hi] with f(lo), f(hi) of opposite
// sign (or either zero). Converges to absolute tolerance in x.
template <class F>
double bisect(const F& f, double lo, double hi, double xtol = 1e-14, int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if ((flo < 0) == (fhi < 0))
        throw std::runtime_error("bisect: root not bracketed");
    for (int i = 0; i < max_iter && hi - lo > xtol; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0) return mid;
        if ((flo < 0) != (fm < 0)) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

inline double clamp(double x, double lo, double hi) {
    return std::min(std::max(x, lo), hi);
}

}  // namespace rlp
