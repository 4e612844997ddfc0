#include "rlp/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "rlp/numerics.hpp"
#include "rlp/parallel.hpp"
#include "rlp/rng.hpp"

namespace rlp {

const char* to_string(PolicyCase c) {
    switch (c) {
        case PolicyCase::interior: return "interior";
        case PolicyCase::c1_at_b: return "c1_at_b";
        case PolicyCase::c1_at_0: return "c1_at_0";
        case PolicyCase::c2_at_b: return "c2_at_b";
        case PolicyCase::corner_0_b: return "corner_0_b";
    }
    return "?";
}

namespace {

constexpr double kEdge = 1e-11;  // offset used to stay clear of kinks

double theta1(const ThetaBasis& basis, double x) {
    const double b = basis.threshold();
    if (x == 0.0) return basis.deriv(x, Side::right);
    if (x == b) return basis.deriv(x, Side::right);
    return basis.deriv(x);
}

// Decreasing/increasing sub-branches of theta' around eps2, split at the
// bounded-variation kink b when it falls inside.
struct Branch {
    double lo, hi;
    bool increasing;
};

std::vector<Branch> split_branch(double lo, double hi, double b, bool kink_at_b, bool increasing) {
    if (kink_at_b && b > lo && b < hi)
        return {{lo, b, increasing}, {b, hi, increasing}};
    return {{lo, hi, increasing}};
}

// Root of theta'(x) = lam on a monotone piece, if the range covers lam.
std::optional<double> root_on(const ThetaBasis& basis, const Branch& br, double lam) {
    double a = br.lo + kEdge * std::max(1.0, std::abs(br.lo));
    double c = br.hi - kEdge * std::max(1.0, std::abs(br.hi));
    if (!(c > a)) return std::nullopt;
    double fa = theta1(basis, a) - lam, fc = theta1(basis, c) - lam;
    if (fa == 0) return a;
    if (fc == 0) return c;
    if ((fa < 0) == (fc < 0)) return std::nullopt;
    return bisect([&](double x) { return theta1(basis, x) - lam; }, a, c, 1e-13);
}

struct Candidate {
    Policy p;
    PolicyCase kase;
    std::vector<double> residuals;
};

}  // namespace

SearchBox search_box(const ThetaBasis& basis) {
    const auto& spec = basis.spec();
    const double beta = spec.econ.beta;
    double c2m = std::max({spec.refraction.b, spec.econ.l, 10.0 * beta});
    double best_interior = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 60; ++k) {
        // refresh incumbent over a coarse grid of the current box
        const int n = 33;
        for (int i = 0; i < n; ++i) {
            double c1 = (c2m - beta) * i / n;
            for (int j = 1; j <= n; ++j) {
                double c2 = c1 + beta + (c2m - c1 - beta) * j / n;
                if (c2 > c1 + beta)
                    best_interior = std::min(best_interior, H_surface(basis, c1, c2));
            }
        }
        double boundary = std::numeric_limits<double>::infinity();
        double c1_cap = c2m - beta - 1e-9 * std::max(1.0, c2m);
        for (int i = 0; i <= 64; ++i) {
            double c1 = std::min((c2m - beta) * i / 64.0, c1_cap);
            boundary = std::min(boundary, H_surface(basis, c1, c2m));
        }
        if (boundary > 2.0 * best_interior) return {c2m, c2m, k};
        c2m *= 2.0;
    }
    throw std::runtime_error("search_box: no containment after 60 doublings");
}

OptimizerResult optimize(const ThetaBasis& basis) {
    const auto& spec = basis.spec();
    if (!(spec.econ.q > 0)) throw std::domain_error("optimize: q > 0 required");
    const double b = spec.refraction.b, beta = spec.econ.beta, l = spec.econ.l;
    const bool kink_b = basis.has_kink_at_b();

    SearchBox box = search_box(basis);
    const double c2max = box.c2_max;

    double eps2;
    if (spec.econ.m > 0) {
        eps2 = breakpoints(basis).eps2;
    } else {
        // theta = w^{(q)}: locate the minimum of theta' by scan + refinement
        int n = 4000;
        double best = std::numeric_limits<double>::infinity(), argbest = 0;
        for (int i = 1; i < n; ++i) {
            double x = c2max * i / n;
            if (std::abs(x - b) < 1e-9) continue;
            double d = theta1(basis, x);
            if (d < best) {
                best = d;
                argbest = x;
            }
        }
        eps2 = argbest;
    }

    std::vector<Candidate> cands;
    auto push = [&](Policy p, PolicyCase kase) {
        if (!policy_valid(spec, p) || p.c2 > c2max + 1e-9 || p.c1 > c2max) return;
        double h = H_surface(basis, p.c1, p.c2);
        std::vector<double> res;
        double d2v = theta1(basis, p.c2);
        double d1v = p.c1 > 0 ? theta1(basis, p.c1) : theta1(basis, kEdge);
        switch (kase) {
            case PolicyCase::interior:
                res = {std::abs(d1v - d2v) / h, std::abs(d2v - h) / h};
                break;
            case PolicyCase::c1_at_0:
            case PolicyCase::c1_at_b:
                res = {std::abs(d2v - h) / h};
                break;
            case PolicyCase::c2_at_b:
                res = {std::abs(d1v - h) / h};
                break;
            case PolicyCase::corner_0_b:
                res = {};
                break;
        }
        cands.push_back({p, kase, std::move(res)});
    };

    // --- level-set solve -------------------------------------------------
    // theta' is decreasing on (0, eps2) and increasing on (eps2, inf), up to
    // the kink at b in the bounded-variation case. For a slope level lam,
    // c1(lam) and c2(lam) are the branch roots; the optimum is the lam where
    // theta(c2) - theta(c1) = lam (c2 - c1 - beta).
    auto dec = split_branch(0.0, eps2, b, kink_b, false);
    auto inc = split_branch(eps2, c2max, b, kink_b, true);

    double d_at_0 = theta1(basis, kEdge);

    // c1 chooser: prefer the given sub-branch, fall back to the other, then
    // to the clamps at 0 and eps2.
    auto c1_of = [&](double lam, size_t prefer) -> double {
        for (size_t k = 0; k < dec.size(); ++k) {
            auto r = root_on(basis, dec[(prefer + k) % dec.size()], lam);
            if (r) return *r;
        }
        if (eps2 <= 0 || lam >= d_at_0) return 0.0;
        return eps2;
    };
    auto c2_of = [&](double lam) -> double {
        for (const auto& br : inc) {
            auto r = root_on(basis, br, lam);
            if (r) return *r;
        }
        // below the branch range: pinned at the junction (or at the kink b
        // when lam falls inside the derivative jump)
        if (kink_b && b > eps2 && lam > theta1(basis, b - kEdge * b)) return b;
        if (lam >= theta1(basis, c2max)) return c2max;
        return eps2 + kEdge;
    };

    for (size_t prefer = 0; prefer < dec.size(); ++prefer) {
        auto F = [&](double lam) {
            double c1 = c1_of(lam, prefer), c2 = c2_of(lam);
            return basis.value(c2) - basis.value(c1) - lam * (c2 - c1 - beta);
        };
        double lam_lo = eps2 > 0 ? theta1(basis, std::max(eps2 - kEdge * eps2, kEdge)) : d_at_0;
        lam_lo = std::min(lam_lo, theta1(basis, eps2 + kEdge * std::max(1.0, eps2)));
        lam_lo = std::max(lam_lo * (1 + 1e-12), 1e-300);
        double lam_hi = lam_lo;
        int guard = 0;
        while (F(lam_hi) > 0 && guard++ < 200) lam_hi *= 2;
        if (F(lam_hi) > 0) continue;
        double lam = bisect(F, lam_lo, lam_hi, 1e-10);
        double c1 = c1_of(lam, prefer), c2 = c2_of(lam);
        PolicyCase kase = PolicyCase::interior;
        if (c1 == 0.0) kase = (c2 == b) ? PolicyCase::corner_0_b : PolicyCase::c1_at_0;
        else if (c2 == b) kase = PolicyCase::c2_at_b;
        else if (c1 == b) kase = PolicyCase::c1_at_b;
        push({c1, c2}, kase);
    }

    // --- boundary-case candidates ----------------------------------------
    // stationarity in c2 with c1 pinned: theta'(c2)(c2-c1-beta) = theta(c2)-theta(c1)
    auto scan_c2 = [&](double c1, PolicyCase kase) {
        double t1 = basis.value(c1);
        auto g = [&](double c2) { return theta1(basis, c2) * (c2 - c1 - beta) - (basis.value(c2) - t1); };
        const int n = 2048;
        double lo = c1 + beta + 1e-9;
        if (!(lo < c2max)) return;
        double px = lo, pv = g(px);
        for (int i = 1; i <= n; ++i) {
            double x = lo + (c2max - lo) * i / n;
            if (kink_b && ((px < b) != (x < b))) {  // bracket the kink separately
                double xb = b - kEdge * b;
                if (xb > px && (pv < 0) != (g(xb) < 0))
                    push({c1, bisect(g, px, xb, 1e-12)}, kase);
                px = b + kEdge * b;
                pv = g(px);
                continue;
            }
            double v = g(x);
            if ((pv < 0) != (v < 0)) push({c1, bisect(g, px, x, 1e-12)}, kase);
            px = x;
            pv = v;
        }
    };
    scan_c2(0.0, PolicyCase::c1_at_0);
    if (b > 0) scan_c2(b, PolicyCase::c1_at_b);

    // stationarity in c1 with c2 = b: theta'(c1)(b-c1-beta) = theta(b)-theta(c1)
    if (b > beta) {
        double tb = basis.value(b);
        auto g = [&](double c1) { return theta1(basis, c1) * (b - c1 - beta) - (tb - basis.value(c1)); };
        const int n = 1024;
        double px = kEdge, pv = g(px);
        for (int i = 1; i <= n; ++i) {
            double x = (b - beta - 1e-9) * i / n;
            if (x <= px) continue;
            double v = g(x);
            if ((pv < 0) != (v < 0)) push({bisect(g, px, x, 1e-12), b}, PolicyCase::c2_at_b);
            px = x;
            pv = v;
        }
        push({0.0, b}, PolicyCase::corner_0_b);
    }

    if (cands.empty()) throw std::runtime_error("optimize: no feasible candidate in the search box");

    auto h_of = [&](const Candidate& c) { return H_surface(basis, c.p.c1, c.p.c2); };
    std::stable_sort(cands.begin(), cands.end(),
                     [&](const Candidate& a, const Candidate& c) { return h_of(a) < h_of(c); });

    OptimizerResult out;
    out.policy = cands[0].p;
    out.kase = cands[0].kase;
    out.h_value = h_of(cands[0]);
    out.first_order_residuals = cands[0].residuals;
    out.box = box;
    if (basis.spec().is_bounded_variation() && std::abs(out.policy.c2 - b) < 1e-6)
        out.near_b_flag = true;
    for (size_t i = 1; i < cands.size(); ++i) {
        bool same = std::abs(cands[i].p.c1 - out.policy.c1) < 1e-7 &&
                    std::abs(cands[i].p.c2 - out.policy.c2) < 1e-7;
        if (!same && h_of(cands[i]) <= out.h_value * (1 + 1e-9)) {
            out.tie_flag = true;
            out.tie_with = cands[i].p;
            break;
        }
    }
    return out;
}

OptimalityReport verify_optimality(const ThetaBasis& basis, const OptimizerResult& result,
                                   int n_random, unsigned long long seed) {
    OptimalityReport rep;
    const auto& spec = basis.spec();
    const double b = spec.refraction.b, l = spec.econ.l;
    const Policy& p = result.policy;

    // (a) theta' nondecreasing on [c2*, c2*+5l], step 1e-2, kink excluded
    rep.deriv_monotone_ok = true;
    double prev = -std::numeric_limits<double>::infinity();
    for (double x = p.c2; x <= p.c2 + 5 * l; x += 1e-2) {
        if (basis.has_kink_at_b() && std::abs(x - b) < 1e-9) continue;
        double d = theta1(basis, x);
        if (d < prev * (1 - 1e-12)) {
            rep.deriv_monotone_ok = false;
            break;
        }
        prev = d;
    }

    // (b) HJB residual pattern
    auto curve = make_value_curve(basis, p);
    double q = spec.econ.q;
    rep.hjb_pattern_ok = true;
    const int n = 200;
    for (int i = 0; i < n; ++i) {
        double x = -l + (p.c2 + 3 * l + l) * (i + 0.5) / n;
        bool excluded = false;
        for (double k : {0.0, b, p.c2})
            if (std::abs(x - k) < 2e-3) excluded = true;
        if (excluded || x <= -l + 1e-6) continue;
        double r = hjb_residual(basis, curve, x);
        double V = curve.value(basis, x);
        if (x < p.c2) {
            rep.worst_hjb_interior = std::max(rep.worst_hjb_interior, std::abs(r) / (q * V + 1));
            if (std::abs(r) > 1e-6 * (q * V + 1)) rep.hjb_pattern_ok = false;
        } else {
            rep.worst_hjb_above = std::max(rep.worst_hjb_above, r);
            if (r > 1e-6) rep.hjb_pattern_ok = false;
        }
    }

    // (c) no random policy in the box beats the result
    Philox4x64 rng(seed);
    double beta = spec.econ.beta;
    rep.best_probe_h = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_random; ++i) {
        double c1 = rng.uniform() * (result.box.c1_max - beta);
        double c2 = c1 + beta + rng.uniform() * (result.box.c2_max - c1 - beta);
        if (!(c2 > c1 + beta)) continue;
        rep.best_probe_h = std::min(rep.best_probe_h, H_surface(basis, c1, c2));
    }
    rep.random_probe_ok = rep.best_probe_h >= result.h_value * (1 - 1e-12);
    return rep;
}

GridOracleResult grid_oracle(const ThetaBasis& basis, double coarse_step, double fine_step) {
    const auto& spec = basis.spec();
    const double beta = spec.econ.beta;
    SearchBox box = search_box(basis);

    auto minimize_on = [&](double c1_lo, double c1_hi, double c2_lo, double c2_hi,
                           double step, int* basins) -> GridOracleResult {
        int n1 = (int)std::floor((c1_hi - c1_lo) / step) + 1;
        int n2 = (int)std::floor((c2_hi - c2_lo) / step) + 1;
        std::vector<double> h((size_t)n1 * n2, std::numeric_limits<double>::infinity());
        std::vector<int> rows(n1);
        for (int i = 0; i < n1; ++i) rows[i] = i;
        parallel_for(n1, [&](size_t ii) {
            int i = rows[ii];
            double c1 = c1_lo + i * step;
            for (int j = 0; j < n2; ++j) {
                double c2 = c2_lo + j * step;
                if (c2 > c1 + beta) h[(size_t)i * n2 + j] = H_surface(basis, c1, c2);
            }
        });
        GridOracleResult res;
        res.h_value = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n1; ++i)
            for (int j = 0; j < n2; ++j) {
                double v = h[(size_t)i * n2 + j];
                if (v < res.h_value) {
                    res.h_value = v;
                    res.policy = {c1_lo + i * step, c2_lo + j * step};
                }
            }
        if (basins) {
            *basins = 0;
            for (int i = 0; i < n1; ++i)
                for (int j = 0; j < n2; ++j) {
                    double v = h[(size_t)i * n2 + j];
                    if (!std::isfinite(v)) continue;
                    bool minimal = true, on_feasibility_edge = false;
                    for (int di = -1; di <= 1 && minimal; ++di)
                        for (int dj = -1; dj <= 1; ++dj) {
                            if (!di && !dj) continue;
                            int i2 = i + di, j2 = j + dj;
                            if (i2 < 0 || i2 >= n1 || j2 < 0 || j2 >= n2) continue;
                            double w = h[(size_t)i2 * n2 + j2];
                            if (!std::isfinite(w)) {
                                on_feasibility_edge = true;
                                continue;
                            }
                            if (w < v) {
                                minimal = false;
                                break;
                            }
                        }
                    // H blows up toward c2 = c1 + beta, so cells hugging that
                    // edge cannot hold a genuine basin
                    if (minimal && !on_feasibility_edge) ++(*basins);
                }
        }
        return res;
    };

    int basins = 0;
    auto coarse = minimize_on(0.0, box.c1_max, beta, box.c2_max, coarse_step, &basins);
    double w = 2.0 * coarse_step;
    auto fine = minimize_on(std::max(0.0, coarse.policy.c1 - w), coarse.policy.c1 + w,
                            std::max(beta, coarse.policy.c2 - w), coarse.policy.c2 + w,
                            fine_step, nullptr);
    fine.coarse_basins = basins;
    return fine;
}

SweepParam sweep_param_from_string(const std::string& name) {
    if (name == "beta") return SweepParam::beta;
    if (name == "delta") return SweepParam::delta;
    if (name == "b") return SweepParam::b;
    if (name == "l") return SweepParam::l;
    if (name == "m") return SweepParam::m;
    if (name == "q") return SweepParam::q;
    throw std::invalid_argument("unknown sweep parameter: " + name);
}

const char* to_string(SweepParam p) {
    switch (p) {
        case SweepParam::beta: return "beta";
        case SweepParam::delta: return "delta";
        case SweepParam::b: return "b";
        case SweepParam::l: return "l";
        case SweepParam::m: return "m";
        case SweepParam::q: return "q";
    }
    return "?";
}

std::vector<SweepRow> sweep(const ProblemSpec& base, SweepParam param, double lo, double hi, int n) {
    std::vector<SweepRow> rows(n);
    parallel_for(n, [&](size_t i) {
        double v = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
        rows[i].param_value = v;
        ProblemSpec spec = base;
        switch (param) {
            case SweepParam::beta: spec.econ.beta = v; break;
            case SweepParam::delta: spec.refraction.delta = v; break;
            case SweepParam::b: spec.refraction.b = v; break;
            case SweepParam::l: spec.econ.l = v; break;
            case SweepParam::m: spec.econ.m = v; break;
            case SweepParam::q: spec.econ.q = v; break;
        }
        try {
            auto rep = validate(spec);
            if (!rep.ok()) throw std::invalid_argument(rep.violations.front());
            auto basis = ThetaBasis::make(spec);
            auto res = optimize(basis);
            rows[i].policy = res.policy;
            rows[i].h_value = res.h_value;
            rows[i].kase = res.kase;
        } catch (const std::exception& e) {
            rows[i].error = e.what();
        }
    });
    return rows;
}

}  // namespace rlp
