#include "rlp/valuation.hpp"

#include <cmath>

#include "rlp/numerics.hpp"

namespace rlp {

bool policy_valid(const ProblemSpec& spec, const Policy& p) {
    return p.c1 >= 0 && p.c2 > p.c1 + spec.econ.beta;
}

double exit_laplace(const ThetaBasis& basis, double x, double c) {
    if (!(x >= -basis.barrier()) || !(x <= c))
        throw std::domain_error("exit_laplace: -l <= x <= c required");
    if (x == c) return 1.0;
    return basis.value(x) / basis.value(c);
}

double H_surface(const ThetaBasis& basis, double c1, double c2) {
    if (!(c1 >= 0) || !(c2 > c1 + basis.spec().econ.beta))
        throw std::domain_error("H: (c1, c2) outside dom(H)");
    return (basis.value(c2) - basis.value(c1)) / (c2 - c1 - basis.spec().econ.beta);
}

ValueCurve make_value_curve(const ThetaBasis& basis, const Policy& policy) {
    if (!policy_valid(basis.spec(), policy))
        throw std::domain_error("value curve: policy outside dom(H)");
    double t1 = basis.value(policy.c1), t2 = basis.value(policy.c2);
    double ratio = (policy.c2 - policy.c1 - basis.spec().econ.beta) / (t2 - t1);
    return ValueCurve{policy, ratio, ratio * t1};
}

double ValueCurve::value(const ThetaBasis& basis, double x) const {
    if (x <= policy.c2) return ratio * basis.value(x);
    return x - policy.c1 - basis.spec().econ.beta + value_c1;
}

double ValueCurve::value_killed(const ThetaBasis& basis, double x) const {
    return x < -basis.barrier() ? 0.0 : value(basis, x);
}

double ValueCurve::deriv(const ThetaBasis& basis, double x, Side side) const {
    if (x < policy.c2 || (x == policy.c2 && side == Side::left))
        return ratio * basis.deriv(x, side);
    return 1.0;
}

double ValueCurve::second(const ThetaBasis& basis, double x) const {
    if (x < policy.c2) return ratio * basis.second(x);
    if (x == policy.c2) throw std::domain_error("V'': kink at c2");
    return 0.0;
}

double value_policy(const ThetaBasis& basis, const Policy& policy, double x) {
    if (!(x >= -basis.barrier())) throw std::domain_error("value: x >= -l required");
    return make_value_curve(basis, policy).value(basis, x);
}

double value_optimal(const ThetaBasis& basis, const Policy& cstar, double x) {
    double h = H_surface(basis, cstar.c1, cstar.c2);
    double slope = basis.deriv(cstar.c2);
    if (std::abs(slope - h) > 1e-4 * std::abs(h))
        throw std::invalid_argument("value_optimal: first-order residual exceeds 1e-4; policy is not a critical point");
    if (x <= cstar.c2) return basis.value(x) / slope;
    return x - cstar.c2 + basis.value(cstar.c2) / slope;
}

double generator_residual(const ProblemSpec& spec, const std::function<double(double)>& f,
                          double f1, double f2, double x, std::span<const double> integrand_kinks,
                          double z_cut, double tail_value) {
    double fx = f(x);
    double drift = drift_of(spec, x > spec.refraction.b ? Process::Y : Process::X);
    double kill = spec.econ.q + (x < 0 ? spec.econ.m : 0.0);
    if (const auto* bm = std::get_if<BrownianModel>(&spec.model))
        return drift * f1 + 0.5 * bm->sigma * bm->sigma * f2 - kill * fx;
    const auto& cl = std::get<CramerLundbergModel>(spec.model);
    double integral = integrate_split(
        [&](double z) { return f(x - z) * cl.alpha * std::exp(-cl.alpha * z); }, 0.0, z_cut,
        integrand_kinks, 1e-12 * (1.0 + std::abs(fx)));
    integral += tail_value * std::exp(-cl.alpha * std::max(z_cut, 0.0));
    return drift * f1 + cl.eta * (integral - fx) - kill * fx;
}

double hjb_residual(const ThetaBasis& basis, const ValueCurve& curve, double x) {
    const auto& spec = basis.spec();
    const double b = spec.refraction.b, l = spec.econ.l, c2 = curve.policy.c2;
    if (!(x > -l)) throw std::domain_error("hjb_residual: x > -l required");
    for (double k : {0.0, b, c2})
        if (std::abs(x - k) < 1e-3)
            throw std::domain_error("hjb_residual: x inside an excluded kink neighborhood");

    double V1 = curve.deriv(basis, x);
    double V2 = spec.is_bounded_variation() ? 0.0 : curve.second(basis, x);
    // jumps below -l land in the killed region: zero tail beyond z = x + l
    double kinks[3] = {x - c2, x - b, x};
    return generator_residual(
        spec, [&](double u) { return curve.value_killed(basis, u); }, V1, V2, x,
        std::span<const double>(kinks, 3), x + l, 0.0);
}

BoundReport bound_check(const ThetaBasis& basis, const ValueCurve& curve, double x, double y) {
    if (!(x >= y)) throw std::domain_error("bound_check: x >= y required");
    BoundReport rep;
    double beta = basis.spec().econ.beta;
    double Vx = curve.value(basis, x);
    double tol = 1e-9 * std::max(1.0, std::abs(Vx));
    if (y >= 0 && x - y > beta) {
        rep.lower_checked = true;
        double dv = Vx - curve.value(basis, y);
        rep.lower_slack = dv - (x - y - beta);
        rep.lower_ok = rep.lower_slack >= -tol;
    }
    if (y >= -basis.barrier()) {
        rep.upper_checked = true;
        double dv = Vx - curve.value(basis, y);
        double rhs = (1.0 - basis.value(y) / basis.value(x)) * Vx;
        rep.upper_slack = rhs - dv;
        rep.upper_ok = rep.upper_slack >= -tol;
    }
    return rep;
}

}  // namespace rlp
