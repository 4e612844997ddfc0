#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "rlp/parisian.hpp"

using namespace rlp;
using namespace rlp::testing;

TEST_CASE("theta on [-l, 0) is the higher-rate scale function shifted to the barrier") {
    for (const auto& spec : {brownian_spec(), cl_spec()}) {
        auto tb = ThetaBasis::make(spec);
        auto Wqm = ScaleBasis::make(spec, spec.econ.q + spec.econ.m, Process::X);
        double l = spec.econ.l;
        for (double x : {-l, -0.8 * l, -0.2 * l, -1e-9})
            CHECK(tb.value(x) == doctest::Approx(Wqm.value(x + l)).epsilon(1e-12));
        // barrier endpoint: the zero-argument mass
        CHECK(tb.value(-l) == doctest::Approx(Wqm.value(0.0)).epsilon(1e-13));
        // x = 0 continuity against the middle segment
        CHECK(tb.value(0.0) == doctest::Approx(Wqm.value(l)).epsilon(1e-12));
        CHECK_THROWS_AS(tb.value(-l - 1e-6), std::domain_error);
    }
}

TEST_CASE("theta segment continuity at 0 and b") {
    for (const auto& spec : {brownian_spec(), cl_spec()}) {
        auto tb = ThetaBasis::make(spec);
        double b = spec.refraction.b;
        CHECK(std::abs(tb.value(std::nextafter(0.0, -1.0)) - tb.value(0.0)) < 1e-9 * tb.value(0.0));
        CHECK(std::abs(tb.value(std::nextafter(b, -1.0)) - tb.value(b)) < 1e-9 * tb.value(0.0));
    }
}

TEST_CASE("theta matches quadrature of its defining integral") {
    for (const auto& spec : {brownian_spec(), cl_spec()}) {
        auto tb = ThetaBasis::make(spec);
        double l = spec.econ.l, b = spec.refraction.b;
        for (int i = 0; i <= 24; ++i) {
            double x = -l + (b + 3 * l + l) * i / 24.0;
            double closed = tb.value(x);
            double quad = theta_quadrature(spec, x);
            CHECK(std::abs(closed - quad) <= 1e-8 * std::abs(quad));
        }
    }
}

TEST_CASE("theta equals the two-rate auxiliary function below b") {
    for (const auto& spec : {brownian_spec(), cl_spec()}) {
        auto tb = ThetaBasis::make(spec);
        double l = spec.econ.l, b = spec.refraction.b;
        for (int i = 0; i < 50; ++i) {
            double x = -l + (b + l) * (i + 0.3) / 50.0;
            if (x >= b) continue;
            auto g = g_qpq(spec, spec.econ.q, spec.econ.m, x, l);
            CHECK(std::abs(tb.value(x) - g.value) <= 1e-9 * std::abs(g.value));
        }
    }
}

TEST_CASE("theta is strictly increasing") {
    for (const auto& spec : {brownian_spec(), cl_spec()}) {
        auto tb = ThetaBasis::make(spec);
        double prev = -1;
        for (double x = -spec.econ.l; x <= spec.refraction.b + 3 * spec.econ.l; x += 0.01) {
            double v = tb.value(x);
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("theta': smooth for the Gaussian model, kinked for bounded variation") {
    auto bs = brownian_spec();
    auto tb = ThetaBasis::make(bs);
    CHECK(tb.deriv(0.0, Side::left) == doctest::Approx(tb.deriv(0.0, Side::right)).epsilon(1e-11));
    CHECK(tb.deriv(bs.refraction.b, Side::left) ==
          doctest::Approx(tb.deriv(bs.refraction.b, Side::right)).epsilon(1e-11));
    CHECK_FALSE(tb.has_kink_at_zero());

    auto cs = cl_spec();
    auto tc = ThetaBasis::make(cs);
    CHECK(tc.has_kink_at_zero());
    CHECK(tc.deriv(0.0, Side::left) != doctest::Approx(tc.deriv(0.0, Side::right)).epsilon(1e-6));
    CHECK(tc.deriv(cs.refraction.b, Side::left) !=
          doctest::Approx(tc.deriv(cs.refraction.b, Side::right)).epsilon(1e-6));
    CHECK_THROWS_AS(tc.deriv(0.0), std::domain_error);
    CHECK_THROWS_AS(tc.deriv(cs.refraction.b), std::domain_error);
}

TEST_CASE("theta' and theta'' match finite differences away from the kinks") {
    for (const auto& spec : {brownian_spec(), cl_spec()}) {
        auto tb = ThetaBasis::make(spec);
        double l = spec.econ.l, b = spec.refraction.b;
        for (int i = 0; i < 40; ++i) {
            double x = -l + 0.05 + (b + 2 * l) * i / 40.0;
            if (std::abs(x) < 1e-2 || std::abs(x - b) < 1e-2) continue;
            auto f = [&](double u) { return tb.value(u); };
            double fd1 = central_diff(f, x, 1e-5);
            CHECK(tb.deriv(x) == doctest::Approx(fd1).epsilon(1e-6));
            double fd2 = central_second(f, x, 3e-5);
            CHECK(tb.second(x) == doctest::Approx(fd2).epsilon(1e-5));
        }
    }
}

TEST_CASE("theta'' rejects segment boundaries without a side") {
    auto tc = ThetaBasis::make(cl_spec());
    CHECK_THROWS_AS(tc.second(0.0), std::domain_error);
    CHECK_THROWS_AS(tc.second(cl_spec().refraction.b), std::domain_error);
    CHECK(std::isfinite(tc.second(0.0, Side::right)));
}

namespace {

// dense sign-scan of theta'' over a segment: the locations where the sign
// flips, to scan resolution
std::vector<double> sign_flips(const ThetaBasis& tb, double lo, double hi, double step) {
    std::vector<double> flips;
    double px = lo + step / 2, pv = tb.second(px);
    for (double x = px + step; x < hi; x += step) {
        double v = tb.second(x);
        if ((pv < 0) != (v < 0)) flips.push_back(0.5 * (px + x));
        px = x;
        pv = v;
    }
    return flips;
}

}  // namespace

TEST_CASE("breakpoints agree with a dense curvature sign-scan") {
    // Gaussian set: zeta1 in (-l, 0), zeta2 in (0, b), convex tail
    {
        auto spec = brownian_spec();
        auto tb = ThetaBasis::make(spec);
        auto bp = breakpoints(tb);
        REQUIRE(bp.zeta1.has_value());
        REQUIRE(bp.zeta2.has_value());
        CHECK(bp.eps1 >= -spec.econ.l);
        CHECK(bp.eps1 <= 0.0);
        CHECK(bp.tail_always_convex);
        CHECK_FALSE(bp.zeta3.has_value());

        auto flips1 = sign_flips(tb, -spec.econ.l, 0.0, 1e-3);
        REQUIRE(flips1.size() == 1);
        CHECK(std::abs(flips1[0] - *bp.zeta1) < 1e-3);
        CHECK(std::abs(bp.eps1 - *bp.zeta1) < 1e-15);

        auto flips2 = sign_flips(tb, 0.0, spec.refraction.b, 1e-3);
        REQUIRE(flips2.size() == 1);
        CHECK(std::abs(flips2[0] - *bp.zeta2) < 1e-3);
        CHECK(std::abs(bp.eps2 - *bp.zeta2) < 1e-15);

        CHECK(sign_flips(tb, spec.refraction.b, spec.refraction.b + 3 * spec.econ.l, 1e-3).empty());
    }
    // bounded-variation set: all three candidates fall outside their segments,
    // so the curvature is one-signed per segment and eps2 lands on b
    {
        auto spec = cl_spec();
        auto tb = ThetaBasis::make(spec);
        auto bp = breakpoints(tb);
        CHECK(bp.eps1 == -spec.econ.l);  // zeta1 below -l: clamped
        CHECK(bp.eps2 == spec.refraction.b);
        CHECK(sign_flips(tb, -spec.econ.l, 0.0, 1e-3).empty());
        CHECK(sign_flips(tb, 0.0, spec.refraction.b, 1e-3).empty());
        CHECK(sign_flips(tb, spec.refraction.b, spec.refraction.b + 3 * spec.econ.l, 1e-3).empty());
        REQUIRE(bp.zeta3.has_value());
        REQUIRE(bp.zeta2.has_value());
        CHECK(*bp.zeta3 <= *bp.zeta2);
        CHECK_FALSE(bp.zeta_order_violated);
    }
}

TEST_CASE("theta' sign pattern matches the breakpoints") {
    for (const auto& spec : {brownian_spec(), cl_spec()}) {
        auto tb = ThetaBasis::make(spec);
        auto bp = breakpoints(tb);
        double l = spec.econ.l, b = spec.refraction.b;
        auto d = [&](double x) {
            if (x == 0.0 || x == b) return tb.deriv(x, Side::right);
            return tb.deriv(x);
        };
        auto check_monotone = [&](double lo, double hi, bool increasing) {
            if (hi - lo < 2e-2) return;
            double px = lo + 1e-2, pv = d(px);
            for (double x = px + 1e-2; x < hi - 1e-9; x += 1e-2) {
                if (std::abs(x - b) < 1e-2) continue;  // kink excluded (BV)
                double v = d(x);
                if (increasing) CHECK(v >= pv * (1 - 1e-10) - 1e-12);
                else CHECK(v <= pv * (1 + 1e-10) + 1e-12);
                px = x;
                pv = v;
            }
        };
        check_monotone(-l, bp.eps1, false);
        check_monotone(bp.eps1, 0.0, true);
        check_monotone(0.0, bp.eps2, false);
        check_monotone(bp.eps2, bp.eps2 + 3 * l, true);
    }
}

TEST_CASE("theta is pointwise monotone in m and l; ordered in delta and b above b") {
    auto base = cl_spec();
    // m: larger Parisian rate increases theta everywhere
    {
        auto t1 = ThetaBasis::make(base);
        auto s2 = base;
        s2.econ.m = 1.0;
        auto t2 = ThetaBasis::make(s2);
        for (double x = -base.econ.l; x < base.refraction.b + 6; x += 0.37)
            CHECK(t2.value(x) >= t1.value(x) * (1 - 1e-12));
    }
    // l: deeper barrier increases theta on the common domain
    {
        auto s1 = base;
        s1.econ.l = 3.0;
        auto t1 = ThetaBasis::make(s1);
        auto t2 = ThetaBasis::make(base);
        for (double x = -3.0; x < base.refraction.b + 6; x += 0.37)
            CHECK(t2.value(x) >= t1.value(x) * (1 - 1e-12));
    }
    // delta: more refraction increases theta at and above b
    {
        auto s1 = base;
        s1.refraction.delta = 0.05;
        auto t1 = ThetaBasis::make(s1);
        auto t2 = ThetaBasis::make(base);
        for (double x = base.refraction.b + 0.1; x < base.refraction.b + 8; x += 0.37)
            CHECK(t2.value(x) >= t1.value(x) * (1 - 1e-12));
    }
    // b: a higher threshold lowers theta above both thresholds
    {
        auto s1 = base;
        s1.refraction.b = 4.0;
        auto t1 = ThetaBasis::make(s1);
        auto t2 = ThetaBasis::make(base);
        for (double x = base.refraction.b + 0.1; x < base.refraction.b + 8; x += 0.37)
            CHECK(t2.value(x) <= t1.value(x) * (1 + 1e-12));
    }
}

TEST_CASE("without Parisian delay theta reduces to the refracted scale function") {
    for (auto spec : {brownian_spec(), cl_spec()}) {
        spec.econ.m = 0.0;
        auto tb = ThetaBasis::make(spec);
        auto w = RefractedScale::make(spec, spec.econ.q, -spec.econ.l);
        for (double x = -spec.econ.l; x < spec.refraction.b + 6; x += 0.31)
            CHECK(tb.value(x) == doctest::Approx(w.value(x)).epsilon(1e-13));
        CHECK_THROWS_AS(breakpoints(tb), std::domain_error);
    }
}

TEST_CASE("breakpoints require strictly positive q and m") {
    auto spec = brownian_spec();
    spec.econ.q = 0.0;
    spec.econ.m = 0.5;
    CHECK_THROWS_AS(breakpoints(ThetaBasis::make(spec)), std::domain_error);
}
