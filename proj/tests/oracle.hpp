#pragma once
// Test-side oracles, independent of the closed forms they referee:
//  - the refracted scale function by direct quadrature of its defining
//    convolution,
//  - theta by direct quadrature of its defining integral,
//  - central finite differences.
// Only the primitive two-exponential W bases are shared with the
// implementation; every refracted/Parisian quantity is rebuilt here from its
// definition.

#include "rlp/numerics.hpp"
#include "rlp/scale.hpp"

namespace rlp::testing {

// w^{(q)}(x; a) = W^{(q)}(x-a) + delta 1{x>=b} int_b^x WW^{(q)}(x-y) W^{(q)}'(y-a) dy
inline double w_quadrature(const ProblemSpec& spec, double q, double x, double a,
                           double tol = 1e-12) {
    auto W = ScaleBasis::make(spec, q, Process::X);
    auto WW = ScaleBasis::make(spec, q, Process::Y);
    double b = spec.refraction.b;
    double base = W.value(x - a);
    if (x < b || spec.refraction.delta == 0.0) return base;
    double conv = integrate([&](double y) { return WW.value(x - y) * W.w1(y - a); }, b, x, tol);
    return base + spec.refraction.delta * conv;
}

// theta(x) = w^{(q)}(x; -l) + m int_0^l w^{(q)}(x; -l+y) W^{(q+m)}(y) dy,
// with the integrand's w taken from the implementation (validated separately
// against w_quadrature) and the kink at y = x+l on a panel boundary.
inline double theta_quadrature(const ProblemSpec& spec, double x, double tol = 1e-10) {
    const double l = spec.econ.l, m = spec.econ.m, q = spec.econ.q;
    auto Wqm = ScaleBasis::make(spec, q + m, Process::X);
    auto w_at = [&](double origin) { return RefractedScale::make(spec, q, origin); };
    // cache the per-origin refracted scale along the quadrature nodes
    auto integrand = [&](double y) {
        auto w = w_at(-l + y);
        return w.value(x) * Wqm.value(y);
    };
    double kinks[1] = {x + l};
    double integral =
        integrate_split(integrand, 0.0, l, std::span<const double>(kinks, (x < 0 && x > -l) ? 1 : 0), tol);
    return w_at(-l).value(x) + m * integral;
}

inline double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2 * h);
}

inline double central_second(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
}

}  // namespace rlp::testing
