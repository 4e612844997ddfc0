#pragma once
// The Parisian refracted scale function theta(x) = theta^{(q+m,q)}(x, -l):
// three-segment closed form on [-l, 0), [0, b), [b, inf), its first two
// derivatives, and the monotonicity breakpoints of theta'.

#include <memory>
#include <optional>

#include "rlp/scale.hpp"

namespace rlp {

struct Breakpoints {
    double eps1 = 0;  // in [-l, 0]: theta' decreasing on (-l, eps1), increasing on (eps1, 0)
    double eps2 = 0;  // >= 0:      theta' decreasing on (0, eps2), increasing on (eps2, inf)
    std::optional<double> zeta1, zeta2, zeta3;  // curvature sign-change candidates per segment
    bool tail_always_convex = false;  // theta'' > 0 on all of (b, inf): no zeta3
    bool fallback_used = false;       // closed-form candidate failed residual check; sign-scan used
    bool zeta_order_violated = false; // zeta3 > zeta2 observed (logged, not clamped)
};

class ThetaBasis {
  public:
    static ThetaBasis make(const ProblemSpec& spec);

    const ProblemSpec& spec() const { return spec_; }
    double barrier() const { return spec_.econ.l; }
    double threshold() const { return spec_.refraction.b; }

    // Segment index of x: 0 on [-l, 0), 1 on [0, b), 2 on [b, inf).
    int segment_of(double x) const;

    // theta(x); domain error for x < -l. Continuous everywhere on [-l, inf).
    double value(double x) const;
    // As value() but 0 below -l (the killed extension used by the generator).
    double value_killed(double x) const;

    // theta'(x) for x > -l. In the bounded-variation case a side must be
    // given at the kinks {0, b}; elsewhere (and always for UBV) sides agree.
    double deriv(double x, Side side = Side::automatic) const;

    // theta''(x) on segment interiors; domain error at the boundaries {0, b}
    // unless a side selects the adjacent segment's form.
    double second(double x, Side side = Side::automatic) const;

    bool has_kink_at_zero() const { return bv_ && spec_.econ.m > 0; }
    bool has_kink_at_b() const { return bv_ && spec_.refraction.delta > 0; }

    const ScaleBasis& base_q() const { return Wq_; }
    const ScaleBasis& base_q_y() const { return WqY_; }
    const ScaleBasis& base_qm() const { return Wqm_; }
    const RefractedScale& refracted() const { return wq_; }
    const ExpSum& segment_sum(int s) const { return seg_[s]; }

  private:
    ProblemSpec spec_;
    bool bv_ = false;
    ScaleBasis Wq_, WqY_, Wqm_;
    RefractedScale wq_;  // w^{(q)}(.; -l)
    ExpSum seg_[3], d1_[3], d2_[3];
};

// Monotonicity breakpoints of theta'. Requires q > 0, m > 0, l > 0
// (degenerate-parameter error otherwise). Closed-form candidates are checked
// against the curvature sign and replaced by bisection if they fail.
Breakpoints breakpoints(const ThetaBasis& basis);

}  // namespace rlp
