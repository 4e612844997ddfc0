#pragma once
// Fixed-capacity sums of exponentials  sum_i coef_i * exp(rate_i * (x + shift_i)).
// Every scale-function closed form in this library is one of these per segment.
// Evaluation factors out the largest exponent so deep-barrier shifts (x + l
// large) cannot overflow intermediate terms.

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rlp {

struct ExpTerm {
    double coef;
    double rate;
    double shift;  // argument offset: contributes coef * e^{rate * (x + shift)}
};

class ExpSum {
  public:
    ExpSum() = default;

    void add(double coef, double rate, double shift = 0.0) {
        if (n_ == kCap) throw std::logic_error("ExpSum: capacity exceeded");
        t_[n_++] = {coef, rate, shift};
    }

    double operator()(double x) const {
        if (n_ == 0) return 0.0;
        double m = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n_; ++i) m = std::max(m, t_[i].rate * (x + t_[i].shift));
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += t_[i].coef * std::exp(t_[i].rate * (x + t_[i].shift) - m);
        return std::exp(m) * s;
    }

    // Termwise derivative of the given order.
    ExpSum derivative(int order = 1) const {
        ExpSum d;
        d.n_ = n_;
        for (int i = 0; i < n_; ++i) {
            double c = t_[i].coef;
            for (int k = 0; k < order; ++k) c *= t_[i].rate;
            d.t_[i] = {c, t_[i].rate, t_[i].shift};
        }
        return d;
    }

    ExpSum scaled(double factor) const {
        ExpSum s = *this;
        for (int i = 0; i < s.n_; ++i) s.t_[i].coef *= factor;
        return s;
    }

    int size() const { return n_; }
    const ExpTerm& term(int i) const { return t_[i]; }

  private:
    static constexpr int kCap = 8;
    std::array<ExpTerm, kCap> t_{};
    int n_ = 0;
};

}  // namespace rlp
