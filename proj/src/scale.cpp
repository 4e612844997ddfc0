#include "rlp/scale.hpp"

#include <cmath>

#include "rlp/numerics.hpp"

namespace rlp {

ScaleBasis ScaleBasis::make(const ProblemSpec& spec, double rate, Process p) {
    if (!(rate >= 0)) throw std::domain_error("ScaleBasis: rate >= 0 required");
    ScaleBasis sb;
    sb.rate = rate;
    sb.process = p;
    sb.drift = drift_of(spec, p);
    sb.bounded_variation = spec.is_bounded_variation();

    if (const auto* bm = std::get_if<BrownianModel>(&spec.model)) {
        // psi(l) - q = (sigma^2/2)(l - rho1)(l - rho2)
        double mu = sb.drift, s2 = bm->sigma * bm->sigma;
        double d = std::sqrt(mu * mu + 2.0 * rate * s2);
        sb.sigma = bm->sigma;
        sb.root_neg = (-d - mu) / s2;
        sb.root_pos = (d - mu) / s2;
        sb.span = sb.root_pos - sb.root_neg;
        double c = 2.0 / (s2 * sb.span);
        sb.w.add(c, sb.root_pos);
        sb.w.add(-c, sb.root_neg);
    } else {
        const auto& cl = std::get<CramerLundbergModel>(spec.model);
        // psi(l) - q = mu (l - r1)(l - r2) / (l + alpha)
        double mu = sb.drift, a = cl.alpha, eta = cl.eta;
        double B = mu * a - eta - rate;
        double d = std::sqrt(B * B + 4.0 * mu * rate * a);
        sb.root_pos = (d - B) / (2.0 * mu) - 0.0;  // largest root
        sb.root_neg = (-d - B) / (2.0 * mu);
        // rewrite via the product to avoid cancellation when rate ~ 0
        sb.root_pos = (d - B) / (2.0 * mu);
        sb.span = d / mu;
        sb.g_neg = (a + sb.root_neg) / sb.span;
        sb.g_pos = (a + sb.root_pos) / sb.span;
        sb.w.add(sb.g_pos / mu, sb.root_pos);
        sb.w.add(-sb.g_neg / mu, sb.root_neg);
    }
    sb.w1 = sb.w.derivative(1);
    sb.w2 = sb.w.derivative(2);
    return sb;
}

double ScaleBasis::deriv(double x) const {
    if (!(x > 0)) throw std::domain_error("W': x > 0 required (use deriv0_plus for the 0+ limit)");
    return w1(x);
}

double ScaleBasis::deriv0_plus() const {
    if (!bounded_variation) return 2.0 / (sigma * sigma);
    // (nu(0,inf) + q)/mu^2 with nu(0,inf) = eta
    return w1(0.0);
}

double ScaleBasis::second(double x) const {
    if (!(x > 0)) throw std::domain_error("W'': x > 0 required");
    return w2(x);
}

RefractedScale RefractedScale::make(const ProblemSpec& spec, double q, double a) {
    require_valid(spec);
    RefractedScale r;
    r.a_ = a;
    r.b_ = spec.refraction.b;
    r.delta_ = spec.refraction.delta;
    r.bv_ = spec.is_bounded_variation();
    if (a > r.b_) throw std::domain_error("RefractedScale: a <= b required");
    r.base_ = ScaleBasis::make(spec, q, Process::X);
    r.base_y_ = ScaleBasis::make(spec, q, Process::Y);

    if (r.delta_ == 0.0) {
        // no refraction: w(x; a) = W(x - a) everywhere
        r.upper_ = r.base_.w;  // evaluated at x - a via shift
        ExpSum shifted;
        for (int i = 0; i < r.base_.w.size(); ++i) {
            auto t = r.base_.w.term(i);
            shifted.add(t.coef, t.rate, -a);
        }
        r.upper_ = shifted;
        r.upper1_ = shifted.derivative(1);
        r.upper2_ = shifted.derivative(2);
        return r;
    }

    const double rX[2] = {r.base_.root_neg, r.base_.root_pos};
    const double rY[2] = {r.base_y_.root_neg, r.base_y_.root_pos};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (rX[i] == rY[j])
                throw std::domain_error("RefractedScale: exponent collision rho_i == rhoY_j (q = 0 with delta > 0)");

    double b = r.b_;
    if (const auto* bm = std::get_if<BrownianModel>(&spec.model)) {
        double s2 = bm->sigma * bm->sigma;
        double rho = r.base_.span, rhoY = r.base_y_.span;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                r.coef_.a_mat[i][j] = 4.0 * r.delta_ * rX[i] * std::exp((rX[i] - rY[j]) * b) /
                                      (s2 * s2 * rho * rhoY * (rX[i] - rY[j]));
        // w(x; a) = sum_i (-1)^i e^{-rho_i a} sum_j (-1)^{j+1} A_ij e^{rhoY_j x}
        for (int j = 0; j < 2; ++j) {
            double c = 0.0;
            for (int i = 0; i < 2; ++i) {
                double sign = ((i + j) % 2 == 0) ? -1.0 : 1.0;  // (-1)^{(i+1)+(j+1)+1}
                c += sign * r.coef_.a_mat[i][j] * std::exp(-rX[i] * a);
            }
            r.upper_.add(c, rY[j]);
        }
    } else {
        const auto& cl = std::get<CramerLundbergModel>(spec.model);
        double mu = cl.mu;
        double rr = r.base_.span;
        double gY[2] = {r.base_y_.g_neg, r.base_y_.g_pos};
        // phi_i(-a) = sum_j (-1)^{j+1} (r_j - rY_{3-i}) e^{(r_j - rY_i) b - r_j a}
        for (int i = 0; i < 2; ++i) {
            double other = rY[1 - i];
            r.coef_.phi[i] = (rX[0] - other) * std::exp((rX[0] - rY[i]) * b - rX[0] * a) -
                             (rX[1] - other) * std::exp((rX[1] - rY[i]) * b - rX[1] * a);
        }
        // w(x; a) = (1/(mu r)) sum_i (-1)^{i+1} GY_i phi_i e^{rY_i x}
        r.upper_.add(gY[0] * r.coef_.phi[0] / (mu * rr), rY[0]);
        r.upper_.add(-gY[1] * r.coef_.phi[1] / (mu * rr), rY[1]);
    }
    r.upper1_ = r.upper_.derivative(1);
    r.upper2_ = r.upper_.derivative(2);
    return r;
}

double RefractedScale::value(double x) const {
    if (x < b_) return base_.value(x - a_);
    return upper_(x);
}

double RefractedScale::deriv(double x, Side side) const {
    if (x <= a_) throw std::domain_error("w': x > a required");
    if (x < b_) return base_.w1(x - a_);
    if (x == b_) {
        if (side == Side::left) return base_.w1(x - a_);
        if (side == Side::right) return upper1_(x);
        if (bv_) throw std::domain_error("w': side required at the threshold b (bounded variation)");
        return upper1_(x);  // continuous for unbounded variation
    }
    return upper1_(x);
}

double RefractedScale::second(double x) const {
    if (x <= a_ || x == b_) throw std::domain_error("w'': segment interior required");
    if (x < b_) return base_.w2(x - a_);
    return upper2_(x);
}

GqpqResult g_qpq(const ProblemSpec& spec, double q, double p, double x, double a) {
    if (!(a >= 0)) throw std::domain_error("g_qpq: a >= 0 required");
    if (x < -a || x > spec.refraction.b)
        throw std::domain_error("g_qpq: -a <= x <= b required");
    auto Wq = ScaleBasis::make(spec, q, Process::X);
    auto Wqp = ScaleBasis::make(spec, q + p, Process::X);

    // route 1: W^{(q+p)}(x+a) - p int_0^x W^{(q)}(x-y) W^{(q+p)}(y+a) dy
    double i1 = 0.0;
    if (x > 0)
        i1 = integrate([&](double y) { return Wq.value(x - y) * Wqp.value(y + a); }, 0.0, x, 1e-12);
    double form1 = Wqp.value(x + a) - p * i1;

    // route 2: W^{(q)}(x+a) + p int_0^a W^{(q)}(x+a-y) W^{(q+p)}(y) dy
    // integrand kink where x+a-y = 0, i.e. y = x+a (inside only when x < 0)
    double kink[1] = {x + a};
    double i2 = integrate_split([&](double y) { return Wq.value(x + a - y) * Wqp.value(y); },
                                0.0, a, std::span<const double>(kink, x < 0 ? 1 : 0), 1e-12);
    double form2 = Wq.value(x + a) + p * i2;

    double scale = std::max({std::abs(form1), std::abs(form2), 1e-300});
    return {form2, form1, form2, std::abs(form1 - form2) / scale};
}

double varpi(const ProblemSpec& spec, double q, double x, double b, double c) {
    if (!(b >= 0) || !(x >= b) || !(c >= b))
        throw std::domain_error("varpi: 0 <= b <= x and b <= c required");
    ProblemSpec s = spec;
    s.refraction.b = b;
    auto WY = ScaleBasis::make(s, q, Process::Y);
    auto Wq = ScaleBasis::make(s, q, Process::X);
    double wb = Wq.value(b);
    if (wb == 0.0)
        throw std::domain_error("varpi: W^{(q)}(b) = 0 (Brownian with b = 0)");
    auto w0 = RefractedScale::make(s, q, 0.0);
    return WY.value(x - b) * w0.value(c) / (WY.value(c - b) * wb);
}

double convolution_identity_residual(const ProblemSpec& spec, double q, double p, double x) {
    if (!(x > 0)) throw std::domain_error("convolution residual: x > 0 required");
    auto Wq = ScaleBasis::make(spec, q, Process::X);
    auto Wqp = ScaleBasis::make(spec, q + p, Process::X);
    double conv = integrate([&](double y) { return Wq.value(x - y) * Wqp.value(y); }, 0.0, x, 1e-10);
    return std::abs(p * conv - (Wqp.value(x) - Wq.value(x)));
}

}  // namespace rlp
