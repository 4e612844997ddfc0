#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "rlp/optimizer.hpp"
#include "rlp/rng.hpp"
#include "rlp/valuation.hpp"

using namespace rlp;
using namespace rlp::testing;

TEST_CASE("exit_laplace: endpoints and monotonicity") {
    for (const auto& spec : {brownian_spec(), cl_spec()}) {
        auto tb = ThetaBasis::make(spec);
        double l = spec.econ.l, c = spec.refraction.b + 2;
        CHECK(exit_laplace(tb, c, c) == 1.0);
        if (spec.is_bounded_variation()) {
            double mu = std::get<CramerLundbergModel>(spec.model).mu;
            CHECK(exit_laplace(tb, -l, c) == doctest::Approx((1 / mu) / tb.value(c)).epsilon(1e-12));
        } else {
            CHECK(exit_laplace(tb, -l, c) == doctest::Approx(0.0).epsilon(1e-14));
        }
        double prev = -1;
        for (double x = -l; x <= c; x += 0.1) {
            double v = exit_laplace(tb, x, c);
            CHECK(v > prev);
            CHECK(v <= 1.0 + 1e-12);
            prev = v;
        }
        // nonincreasing in the exit level
        for (double x : {-1.0, 0.5, 2.0}) {
            double a = exit_laplace(tb, x, c), b2 = exit_laplace(tb, x, c + 1.0);
            CHECK(b2 <= a);
        }
        CHECK_THROWS_AS(exit_laplace(tb, c + 0.1, c), std::domain_error);
        CHECK_THROWS_AS(exit_laplace(tb, -l - 0.1, c), std::domain_error);
    }
}

TEST_CASE("value_policy: payment identity, barrier value, affine branch") {
    for (const auto& spec : {brownian_spec(), cl_spec()}) {
        auto tb = ThetaBasis::make(spec);
        Policy p{1.0, 4.0};
        double beta = spec.econ.beta;
        CHECK(value_policy(tb, p, p.c2) - value_policy(tb, p, p.c1) ==
              doctest::Approx(p.c2 - p.c1 - beta).epsilon(1e-12));
        if (!spec.is_bounded_variation())
            CHECK(value_policy(tb, p, -spec.econ.l) == doctest::Approx(0.0).epsilon(1e-14));
        // continuity at c2 and exact unit slope above
        auto curve = make_value_curve(tb, p);
        CHECK(curve.value(tb, std::nextafter(p.c2, 0.0)) ==
              doctest::Approx(curve.value(tb, p.c2)).epsilon(1e-12));
        CHECK(curve.deriv(tb, p.c2 + 0.5) == 1.0);
        CHECK(curve.value(tb, p.c2 + 2.0) - curve.value(tb, p.c2 + 1.0) ==
              doctest::Approx(1.0).epsilon(1e-12));
        // V >= 0 and nondecreasing
        double prev = -1;
        for (double x = -spec.econ.l; x < p.c2 + 3; x += 0.05) {
            double v = curve.value(tb, x);
            CHECK(v >= 0.0);
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("H blows up at the transaction-cost edge and at infinity") {
    auto tb = ThetaBasis::make(brownian_spec());
    double beta = brownian_spec().econ.beta;
    CHECK(H_surface(tb, 1.0, 1.0 + beta + 1e-6) > 1e6 * tb.deriv(1.0));
    // along c1 = c2/2 the objective eventually grows without bound
    double prev = H_surface(tb, 4.0, 8.0);
    for (double c2 : {16.0, 32.0, 64.0}) {
        double h = H_surface(tb, c2 / 2, c2);
        CHECK(h > prev);
        prev = h;
    }
    CHECK_THROWS_AS(H_surface(tb, -0.1, 4.0), std::domain_error);
    CHECK_THROWS_AS(H_surface(tb, 2.0, 2.0 + beta), std::domain_error);
}

TEST_CASE("value_optimal equals value_policy at the optimum and refuses non-optima") {
    for (const auto& spec : {brownian_spec(), cl_spec()}) {
        auto tb = ThetaBasis::make(spec);
        auto res = optimize(tb);
        double l = spec.econ.l;
        for (int i = 0; i <= 200; ++i) {
            double x = -l + (res.policy.c2 + 2 * l + l) * i / 200.0;
            double a = value_optimal(tb, res.policy, x);
            double b2 = value_policy(tb, res.policy, x);
            CHECK(std::abs(a - b2) <= 1e-8 * std::max(1.0, std::abs(b2)));
        }
        // branch continuity at c2* and unit slope above
        double vc2 = value_optimal(tb, res.policy, res.policy.c2);
        CHECK(vc2 == doctest::Approx(tb.value(res.policy.c2) / tb.deriv(res.policy.c2)).epsilon(1e-12));
        CHECK(value_optimal(tb, res.policy, res.policy.c2 + 1.0) ==
              doctest::Approx(vc2 + 1.0).epsilon(1e-12));
        // clearly non-optimal policy is refused
        CHECK_THROWS_AS(value_optimal(tb, Policy{0.0, res.policy.c2 + 3 * l}, 1.0),
                        std::invalid_argument);
    }
}

TEST_CASE("generator annihilates the value curve below c2* and stays nonpositive above") {
    for (const auto& spec : {brownian_spec(), cl_spec()}) {
        auto tb = ThetaBasis::make(spec);
        auto res = optimize(tb);
        auto curve = make_value_curve(tb, res.policy);
        double q = spec.econ.q, l = spec.econ.l, b = spec.refraction.b;
        for (int i = 0; i < 60; ++i) {
            double x = -l + (res.policy.c2 + 3 * l + l) * (i + 0.5) / 60.0;
            bool excluded = false;
            for (double k : {0.0, b, res.policy.c2})
                if (std::abs(x - k) < 1.5e-3) excluded = true;
            if (excluded || x <= -l + 1e-9) continue;
            double r = hjb_residual(tb, curve, x);
            double V = curve.value(tb, x);
            if (x < res.policy.c2) {
                CHECK(std::abs(r) < 1e-6 * (q * V + 1));
            } else {
                CHECK(r <= 1e-6);
            }
        }
    }
}

TEST_CASE("generator on a constant: killing only") {
    for (const auto& spec : {brownian_spec(), cl_spec()}) {
        double q = spec.econ.q, m = spec.econ.m;
        auto one = [](double) { return 1.0; };
        double r_neg = generator_residual(spec, one, 0.0, 0.0, -1.0, {}, 5.0, 1.0);
        CHECK(r_neg == doctest::Approx(-(q + m)).epsilon(1e-12));
        double r_pos = generator_residual(spec, one, 0.0, 0.0, 2.0, {}, 5.0, 1.0);
        CHECK(r_pos == doctest::Approx(-q).epsilon(1e-12));
    }
}

TEST_CASE("hjb_residual rejects kink neighborhoods") {
    auto tb = ThetaBasis::make(cl_spec());
    auto res = optimize(tb);
    auto curve = make_value_curve(tb, res.policy);
    CHECK_THROWS_AS(hjb_residual(tb, curve, 5e-4), std::domain_error);
    CHECK_THROWS_AS(hjb_residual(tb, curve, cl_spec().refraction.b + 5e-4), std::domain_error);
    CHECK_THROWS_AS(hjb_residual(tb, curve, res.policy.c2 - 5e-4), std::domain_error);
}

TEST_CASE("value bounds hold for the optimal curve") {
    for (const auto& spec : {brownian_spec(), cl_spec()}) {
        auto tb = ThetaBasis::make(spec);
        auto res = optimize(tb);
        auto curve = make_value_curve(tb, res.policy);
        double beta = spec.econ.beta;

        // degenerate pair: both sides of the upper bound vanish
        auto rep0 = bound_check(tb, curve, 2.0, 2.0);
        CHECK(rep0.upper_checked);
        CHECK(rep0.upper_ok);
        CHECK(rep0.upper_slack == doctest::Approx(0.0).epsilon(1e-14));

        Philox4x64 rng(99);
        for (int i = 0; i < 400; ++i) {
            double y = -spec.econ.l + rng.uniform() * (res.policy.c2 + 5 + spec.econ.l);
            double x = y + rng.uniform() * (res.policy.c2 + 5 - y);
            if (x < y) continue;
            auto rep = bound_check(tb, curve, x, y);
            if (rep.lower_checked) CHECK(rep.lower_ok);
            if (rep.upper_checked) CHECK(rep.upper_ok);
        }
        // tightness of the upper bound along the proportional branch
        double x = res.policy.c2 * 0.8, y = x - 1e-7;
        auto rep = bound_check(tb, curve, x, y);
        CHECK(rep.upper_checked);
        CHECK(std::abs(rep.upper_slack) < 1e-9 * std::max(1.0, curve.value(tb, x)));
        (void)beta;
    }
}
