#pragma once
// Exit Laplace transform, impulse-policy value functions, the H objective,
// and the generator/bound diagnostics used to verify optimality.

#include "rlp/parisian.hpp"

namespace rlp {

struct Policy {
    double c1;  // restart level after a dividend, >= 0
    double c2;  // payment trigger level, > c1 + beta
};

bool policy_valid(const ProblemSpec& spec, const Policy& p);

// E_x[e^{-q k_c^+} 1{exit before Parisian ruin or barrier}] = theta(x)/theta(c),
// for -l <= x <= c. Strictly increasing in x, equal to 1 at x = c.
double exit_laplace(const ThetaBasis& basis, double x, double c);

// (theta(c2) - theta(c1)) / (c2 - c1 - beta) on dom(H) = {c1 >= 0, c2 > c1 + beta}.
double H_surface(const ThetaBasis& basis, double c1, double c2);

// Two-branch closed form of the expected discounted net dividends under the
// (c1, c2) impulse policy: proportional to theta below c2, affine with unit
// slope above.
struct ValueCurve {
    Policy policy;
    double ratio;     // (c2 - c1 - beta) / (theta(c2) - theta(c1))
    double value_c1;  // ratio * theta(c1)

    double value(const ThetaBasis& basis, double x) const;
    // 0 below the bankruptcy barrier (killed extension).
    double value_killed(const ThetaBasis& basis, double x) const;
    double deriv(const ThetaBasis& basis, double x, Side side = Side::automatic) const;
    double second(const ThetaBasis& basis, double x) const;
};

ValueCurve make_value_curve(const ThetaBasis& basis, const Policy& policy);

double value_policy(const ThetaBasis& basis, const Policy& policy, double x);

// Value at a first-order-optimal policy, in the theta(x)/theta'(c2*) form.
// Refuses policies whose stationarity residual |theta'(c2*) - H| / H exceeds
// 1e-4: the simplified form is only valid at critical points of H.
double value_optimal(const ThetaBasis& basis, const Policy& cstar, double x);

// (A - q - m 1{x<0}) f(x) for a twice-differentiable f. The claim integral
// runs over [0, z_cut] with kink-split quadrature; beyond z_cut the function
// is taken to be the constant tail_value (0 for barrier-killed curves).
double generator_residual(const ProblemSpec& spec, const std::function<double(double)>& f,
                          double f1, double f2, double x, std::span<const double> integrand_kinks,
                          double z_cut, double tail_value);

// (A - q - m 1{x<0}) V(x) along a policy value curve; derivatives analytic,
// V killed below -l. x must avoid 1e-3 neighborhoods of the kinks {0, b, c2}.
double hjb_residual(const ThetaBasis& basis, const ValueCurve& curve, double x);

struct BoundReport {
    bool lower_checked = false, lower_ok = true;
    bool upper_checked = false, upper_ok = true;
    double lower_slack = 0;  // V(x)-V(y) - (x-y-beta); >= -tol when ok
    double upper_slack = 0;  // (1 - theta(y)/theta(x)) V(x) - (V(x)-V(y))
};

// Checks x - y - beta <= V(x) - V(y)        (x >= y >= 0, x - y > beta)
//        V(x) - V(y) <= (1 - theta(y)/theta(x)) V(x)   (x >= y >= -l)
// within 1e-9 * max(1, V(x)) slack.
BoundReport bound_check(const ThetaBasis& basis, const ValueCurve& curve, double x, double y);

}  // namespace rlp
