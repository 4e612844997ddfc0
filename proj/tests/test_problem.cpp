#include <doctest.h>

#include "fixtures.hpp"
#include "rlp/numerics.hpp"
#include "rlp/problem.hpp"

using namespace rlp;
using namespace rlp::testing;

TEST_CASE("validate accepts the worked parameter sets") {
    CHECK(validate(brownian_spec()).ok());
    CHECK(validate(cl_spec()).ok());
}

TEST_CASE("validate reports net-profit violation") {
    auto s = cl_spec();
    s.refraction.delta = 2.5;  // 3 - 2.5 - 2/1 < 0
    auto rep = validate(s);
    CHECK_FALSE(rep.ok());
    bool found = false;
    for (const auto& v : rep.violations) found |= v.find("net profit") != std::string::npos;
    CHECK(found);
}

TEST_CASE("validate reports drift-retention violation for bounded variation") {
    auto s = cl_spec();
    s.refraction.delta = 3.5;
    auto rep = validate(s);
    CHECK_FALSE(rep.ok());
    bool found = false;
    for (const auto& v : rep.violations) found |= v.find("delta < mu") != std::string::npos;
    CHECK(found);
}

TEST_CASE("laplace exponent closed forms") {
    auto bs = brownian_spec();
    CHECK(laplace_exponent(bs, 0.0, Process::X) == 0.0);
    // 0.5*1 + 0.5*0.5625*1 = 0.78125
    CHECK(laplace_exponent(bs, 1.0, Process::X) == doctest::Approx(0.78125).epsilon(1e-15));
    auto cs = cl_spec();
    // 3 + 2*(1/2 - 1) = 2
    CHECK(laplace_exponent(cs, 1.0, Process::X) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(laplace_exponent(bs, -0.5, Process::X), std::domain_error);
}

TEST_CASE("Y exponent is X exponent minus delta*lambda exactly") {
    for (const auto& s : {brownian_spec(), cl_spec()})
        for (double lam : {0.0, 0.3, 1.0, 2.7, 9.0})
            CHECK(laplace_exponent(s, lam, Process::Y) ==
                  laplace_exponent(s, lam, Process::X) - s.refraction.delta * lam);
}

TEST_CASE("psi is convex on sampled pairs") {
    for (const auto& s : {brownian_spec(), cl_spec()})
        for (double a : {0.1, 0.5, 1.0, 2.0})
            for (double b : {0.2, 1.5, 3.0, 8.0}) {
                double mid = laplace_exponent(s, 0.5 * (a + b), Process::X);
                CHECK(laplace_exponent(s, a, Process::X) + laplace_exponent(s, b, Process::X) >=
                      2 * mid - 1e-12);
            }
}

TEST_CASE("phi_inverse matches the bisection oracle and the quadratic roots") {
    auto bs = brownian_spec();
    CHECK(phi_inverse(bs, 0.0, Process::X) == 0.0);
    double got = phi_inverse(bs, 0.05, Process::X);
    // independent bracketed bisection on psi(lambda) - q over [0, 10]
    double oracle = bisect([&](double lam) { return laplace_exponent(bs, lam, Process::X) - 0.05; },
                           0.0, 10.0, 1e-14);
    CHECK(got == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(got == doctest::Approx(0.09493082760794024).epsilon(1e-11));

    auto cs = cl_spec();
    double got_cl = phi_inverse(cs, 0.05, Process::X);
    double oracle_cl = bisect([&](double lam) { return laplace_exponent(cs, lam, Process::X) - 0.05; },
                              0.0, 10.0, 1e-14);
    CHECK(got_cl == doctest::Approx(oracle_cl).epsilon(1e-12));
    CHECK(got_cl == doctest::Approx(0.04596084453552104).epsilon(1e-11));
}

TEST_CASE("phi_inverse is nondecreasing in q") {
    for (const auto& s : {brownian_spec(), cl_spec()}) {
        double prev = -1;
        for (double q = 0.0; q <= 2.0; q += 0.1) {
            double v = phi_inverse(s, q, Process::Y);
            CHECK(v >= prev - 1e-13);
            prev = v;
        }
    }
}
