#include "rlp/parisian.hpp"

#include <cmath>

#include "rlp/numerics.hpp"

namespace rlp {

namespace {

// Zero of a two-term exponential sum c1 e^{r1(x+s1)} + c2 e^{r2(x+s2)}.
// Exists iff the coefficients have opposite signs.
std::optional<double> two_term_zero(const ExpSum& e) {
    if (e.size() != 2) return std::nullopt;
    auto a = e.term(0), b = e.term(1);
    if (a.coef == 0 || b.coef == 0 || (a.coef < 0) == (b.coef < 0)) return std::nullopt;
    if (a.rate == b.rate) return std::nullopt;
    return (std::log(std::abs(b.coef / a.coef)) + b.rate * b.shift - a.rate * a.shift) /
           (a.rate - b.rate);
}

}  // namespace

ThetaBasis ThetaBasis::make(const ProblemSpec& spec) {
    require_valid(spec);
    ThetaBasis tb;
    tb.spec_ = spec;
    tb.bv_ = spec.is_bounded_variation();
    const double q = spec.econ.q, m = spec.econ.m, l = spec.econ.l;
    const double b = spec.refraction.b, delta = spec.refraction.delta;

    tb.Wq_ = ScaleBasis::make(spec, q, Process::X);
    tb.WqY_ = ScaleBasis::make(spec, q, Process::Y);
    tb.Wqm_ = ScaleBasis::make(spec, q + m, Process::X);
    tb.wq_ = RefractedScale::make(spec, q, -l);

    if (m == 0.0) {
        // no Parisian delay: theta reduces to w^{(q)}(x; -l)
        for (int i = 0; i < tb.Wq_.w.size(); ++i) {
            auto t = tb.Wq_.w.term(i);
            tb.seg_[0].add(t.coef, t.rate, l);
            tb.seg_[1].add(t.coef, t.rate, l);
        }
        tb.seg_[2] = tb.wq_.upper();
    } else if (const auto* bm = std::get_if<BrownianModel>(&spec.model)) {
        double s2 = bm->sigma * bm->sigma;
        double rX[2] = {tb.Wq_.root_neg, tb.Wq_.root_pos};
        double rS[2] = {tb.Wqm_.root_neg, tb.Wqm_.root_pos};
        double rY[2] = {tb.WqY_.root_neg, tb.WqY_.root_pos};
        double rho = tb.Wq_.span, rho_s = tb.Wqm_.span;

        // [-l, 0): W^{(q+m)}(x + l)
        for (int i = 0; i < tb.Wqm_.w.size(); ++i) {
            auto t = tb.Wqm_.w.term(i);
            tb.seg_[0].add(t.coef, t.rate, l);
        }
        // [0, b): sum_{ij} sign(i,j) Astar_ij e^{rS_i l} e^{rX_j x}
        for (int j = 0; j < 2; ++j) {
            double c = 0.0;
            for (int i = 0; i < 2; ++i) {
                double astar = 4.0 * m / (s2 * s2 * rho * rho_s * (rS[i] - rX[j]));
                double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
                c += sign * astar * std::exp(rS[i] * l);
            }
            tb.seg_[1].add(c, rX[j]);
        }
        if (delta == 0.0) {
            tb.seg_[2] = tb.seg_[1];
        } else {
            // [b, inf): sum_{ij} sign(i,j) Q_i(l) A_ij e^{rY_j x}
            const auto& A = tb.wq_.coefficients().a_mat;
            double Q[2];
            for (int i = 0; i < 2; ++i)
                Q[i] = (rX[i] - rS[0]) / rho_s * std::exp(rS[1] * l) -
                       (rX[i] - rS[1]) / rho_s * std::exp(rS[0] * l);
            for (int j = 0; j < 2; ++j) {
                double c = 0.0;
                for (int i = 0; i < 2; ++i) {
                    double sign = ((i + j) % 2 == 0) ? -1.0 : 1.0;
                    c += sign * Q[i] * A[i][j];
                }
                tb.seg_[2].add(c, rY[j]);
            }
        }
    } else {
        const auto& cl = std::get<CramerLundbergModel>(spec.model);
        double mu = cl.mu;
        double rX[2] = {tb.Wq_.root_neg, tb.Wq_.root_pos};
        double rS[2] = {tb.Wqm_.root_neg, tb.Wqm_.root_pos};
        double rY[2] = {tb.WqY_.root_neg, tb.WqY_.root_pos};
        double G[2] = {tb.Wq_.g_neg, tb.Wq_.g_pos};
        double GY[2] = {tb.WqY_.g_neg, tb.WqY_.g_pos};
        double r = tb.Wq_.span, r_s = tb.Wqm_.span;

        // [-l, 0): W^{(q+m)}(x + l)
        for (int i = 0; i < tb.Wqm_.w.size(); ++i) {
            auto t = tb.Wqm_.w.term(i);
            tb.seg_[0].add(t.coef, t.rate, l);
        }
        // [0, b): (1/(mu r*)) (G_1 phis_1 e^{r1 x} - G_2 phis_2 e^{r2 x})
        double phis[2];
        for (int i = 0; i < 2; ++i) {
            double other = rX[1 - i];
            phis[i] = (rS[0] - other) * std::exp(rS[0] * l) - (rS[1] - other) * std::exp(rS[1] * l);
        }
        tb.seg_[1].add(G[0] * phis[0] / (mu * r_s), rX[0]);
        tb.seg_[1].add(-G[1] * phis[1] / (mu * r_s), rX[1]);
        if (delta == 0.0) {
            tb.seg_[2] = tb.seg_[1];
        } else {
            // [b, inf): (1/(mu r r*)) (GY_1 phiY_1 e^{rY1 x} - GY_2 phiY_2 e^{rY2 x})
            double phiY[2];
            for (int i = 0; i < 2; ++i) {
                double tot = 0.0;
                for (int j = 0; j < 2; ++j) {
                    double inner = 0.0;
                    for (int k = 0; k < 2; ++k) {
                        double sk = (k == 0) ? 1.0 : -1.0;
                        inner += sk * (rX[k] - rY[1 - i]) * (rS[j] - rX[1 - k]) *
                                 std::exp((rX[k] - rY[i]) * b);
                    }
                    tot += ((j == 0) ? -1.0 : 1.0) * std::exp(rS[j] * l) * inner;
                }
                phiY[i] = tot;
            }
            tb.seg_[2].add(GY[0] * phiY[0] / (mu * r * r_s), rY[0]);
            tb.seg_[2].add(-GY[1] * phiY[1] / (mu * r * r_s), rY[1]);
        }
    }

    for (int s = 0; s < 3; ++s) {
        tb.d1_[s] = tb.seg_[s].derivative(1);
        tb.d2_[s] = tb.seg_[s].derivative(2);
    }
    return tb;
}

int ThetaBasis::segment_of(double x) const {
    if (x < 0) return 0;
    return x < spec_.refraction.b ? 1 : 2;
}

double ThetaBasis::value(double x) const {
    if (x < -spec_.econ.l) throw std::domain_error("theta: x >= -l required");
    return seg_[segment_of(x)](x);
}

double ThetaBasis::value_killed(double x) const {
    return x < -spec_.econ.l ? 0.0 : seg_[segment_of(x)](x);
}

double ThetaBasis::deriv(double x, Side side) const {
    if (!(x > -spec_.econ.l)) throw std::domain_error("theta': x > -l required");
    const double b = spec_.refraction.b;
    if (x == 0.0 || x == b) {
        bool kink = (x == 0.0) ? has_kink_at_zero() : has_kink_at_b();
        if (side == Side::left) return d1_[x == 0.0 ? 0 : 1](x);
        if (side == Side::right) return d1_[x == 0.0 ? 1 : 2](x);
        if (kink) throw std::domain_error("theta': side required at a kink (bounded variation)");
        return d1_[segment_of(x)](x);
    }
    return d1_[segment_of(x)](x);
}

double ThetaBasis::second(double x, Side side) const {
    if (!(x > -spec_.econ.l)) throw std::domain_error("theta'': x > -l required");
    if (x == 0.0 || x == spec_.refraction.b) {
        if (side == Side::left) return d2_[x == 0.0 ? 0 : 1](x);
        if (side == Side::right) return d2_[x == 0.0 ? 1 : 2](x);
        throw std::domain_error("theta'': segment interior required");
    }
    return d2_[segment_of(x)](x);
}

Breakpoints breakpoints(const ThetaBasis& basis) {
    const auto& spec = basis.spec();
    const double q = spec.econ.q, m = spec.econ.m, l = spec.econ.l;
    const double b = spec.refraction.b, delta = spec.refraction.delta;
    if (!(q > 0) || !(m > 0))
        throw std::domain_error("breakpoints: q > 0 and m > 0 required");

    Breakpoints bp;
    auto d2 = [&](double x) {
        if (x == 0.0 || x == b) x = std::nextafter(x, x + 1.0);
        return basis.second(x);
    };

    // Residual check for a closed-form candidate: curvature must flip sign
    // across it. Falls back to bisection on the segment when it does not.
    auto settle = [&](std::optional<double> cand, double lo, double hi) -> std::optional<double> {
        double h = 1e-6 * std::max(1.0, hi - lo);
        if (cand && !(*cand > lo + h && *cand < hi - h))
            return cand;  // outside the segment: clamping handles it
        if (cand) {
            double dl = d2(*cand - h), dr = d2(*cand + h);
            double scale = std::abs(dl) + std::abs(dr) + 1e-300;
            if ((dl < 0) != (dr < 0) || std::abs(d2(*cand)) <= 1e-6 * scale) return cand;
        }
        // scan for a sign change
        bp.fallback_used = true;
        const int n = 2000;
        double px = lo + (hi - lo) * 1e-9;
        double pv = d2(px);
        for (int i = 1; i <= n; ++i) {
            double x = lo + (hi - lo) * i / double(n);
            double v = d2(x);
            if ((pv < 0) != (v < 0)) return bisect(d2, px, x, 1e-12);
            px = x;
            pv = v;
        }
        return std::nullopt;
    };

    auto zero_of = [&](const ExpSum& seg) { return two_term_zero(seg.derivative(2)); };

    bp.zeta1 = zero_of(basis.segment_sum(0));
    bp.eps1 = clamp(bp.zeta1.value_or(-l), -l, 0.0);

    std::optional<double> z2 = zero_of(basis.segment_sum(1));
    std::optional<double> z3;
    if (delta > 0) z3 = zero_of(basis.segment_sum(2));
    bp.zeta2 = z2;
    bp.zeta3 = z3;
    bp.tail_always_convex = delta > 0 && !z3.has_value();
    if (z2 && z3 && *z3 > *z2 + 1e-12) bp.zeta_order_violated = true;

    if (delta == 0.0) {
        auto z = settle(z2, 0.0, b + 3 * l + 10.0);
        bp.eps2 = std::max(z.value_or(0.0), 0.0);
    } else if (b == 0.0) {
        auto z = settle(z3, 0.0, 3 * l + 10.0);
        bp.eps2 = std::max(z.value_or(0.0), 0.0);
    } else {
        auto zz2 = settle(z2, 0.0, b);
        if (z3) {
            auto zz3 = settle(z3, b, b + 3 * l + 10.0);
            bp.eps2 = std::min(std::max(zz2.value_or(0.0), 0.0), std::max(zz3.value_or(b), b));
        } else {
            bp.eps2 = std::min(std::max(zz2.value_or(0.0), 0.0), b);
        }
    }
    return bp;
}

}  // namespace rlp
