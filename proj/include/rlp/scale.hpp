#pragma once
// Scale functions of the underlying and refracted processes.
//
// Both supported models have two-exponential scale functions
//   W^{(q)}(x) = w_pos e^{r_pos x} + w_neg e^{r_neg x}   (x >= 0, zero below),
// so the refracted scale function w^{(q)}(x; a) and everything built on it
// stay finite sums of exponentials, segment by segment.

#include <optional>

#include "rlp/expsum.hpp"
#include "rlp/problem.hpp"

namespace rlp {

enum class Side { automatic, left, right };

// W^{(rate)} of process X or Y: exponents, Cramer-Lundberg weights G_i, and
// the two-term exponential form.
struct ScaleBasis {
    double rate = 0;  // the q the basis is built for
    Process process = Process::X;
    double root_neg = 0, root_pos = 0, span = 0;  // rho_1 < 0 <= rho_2, rho = rho_2 - rho_1
    double g_neg = 0, g_pos = 0;                  // CL only: G_1, G_2 with G_2 - G_1 = 1
    bool bounded_variation = false;
    double drift = 0;  // mu (X) or mu - delta (Y)
    double sigma = 0;  // 0 for CL
    ExpSum w;          // W^{(rate)} on [0, inf)
    ExpSum w1, w2;     // first and second termwise derivatives

    static ScaleBasis make(const ProblemSpec& spec, double rate, Process p);

    // W^{(rate)}(x), extended by zero on (-inf, 0).
    double value(double x) const { return x < 0 ? 0.0 : w(x); }
    // Derivative for x > 0 (domain error at x <= 0; the 0+ limit is a
    // separate constant, see deriv0_plus).
    double deriv(double x) const;
    double deriv0_plus() const;  // 2/sigma^2 (UBV) or (eta + q)/mu^2 (BV)
    double second(double x) const;
    double value0() const { return bounded_variation ? 1.0 / drift : 0.0; }
};

// Named coefficients of the closed form of w^{(q)}(x; a) on [b, inf).
// Brownian: a_mat[i][j] = A_ij with e^{-rho_i a} folded in by the caller;
// CL: phi[i]. Construction checks the exponent-separation denominators.
struct RefractedCoefficients {
    // Brownian: A_ij = 4 delta rho_i e^{(rho_i - rhoY_j) b} / (sigma^4 rho rhoY (rho_i - rhoY_j))
    double a_mat[2][2] = {{0, 0}, {0, 0}};
    // CL: phi_i(-a) = sum_j (-1)^{j+1} (r_j - rY_{3-i}) e^{(r_j - rY_i) b - r_j a}
    double phi[2] = {0, 0};
};

// w^{(q)}(x; a): W^{(q)}(x - a) below b, two-exponential closed form at or
// above b. Requires a <= b (every use in this library has a <= 0 <= b).
class RefractedScale {
  public:
    static RefractedScale make(const ProblemSpec& spec, double q, double a);

    double value(double x) const;
    // Side is required at x == b in the bounded-variation case.
    double deriv(double x, Side side = Side::automatic) const;
    double second(double x) const;

    const ScaleBasis& base() const { return base_; }
    const ScaleBasis& base_y() const { return base_y_; }
    const RefractedCoefficients& coefficients() const { return coef_; }
    const ExpSum& upper() const { return upper_; }
    double threshold() const { return b_; }
    double origin() const { return a_; }

  private:
    double a_ = 0, b_ = 0, delta_ = 0;
    bool bv_ = false;
    ScaleBasis base_, base_y_;
    RefractedCoefficients coef_;
    ExpSum upper_, upper1_, upper2_;  // x >= b segment and derivatives
};

// Both integral routes to the two-rate auxiliary function g^{(q+p,q)}(x, a),
// each evaluated by adaptive quadrature; they must agree.
struct GqpqResult {
    double value;  // the shared value (route 2, the upward-shifted form)
    double form1;
    double form2;
    double rel_gap;
};
GqpqResult g_qpq(const ProblemSpec& spec, double q, double p, double x, double a);

// Ratio functional of the two-sided exit identities; positive for x > b.
// Throws std::domain_error when W^{(q)}(b) = 0 (Brownian with b = 0).
double varpi(const ProblemSpec& spec, double q, double x, double b, double c);

// | p * int_0^x W^{(q)}(x-y) W^{(q+p)}(y) dy - (W^{(q+p)}(x) - W^{(q)}(x)) |
double convolution_identity_residual(const ProblemSpec& spec, double q, double p, double x);

}  // namespace rlp
