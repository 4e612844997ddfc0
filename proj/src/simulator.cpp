#include "rlp/simulator.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "rlp/parallel.hpp"
#include "rlp/rng.hpp"

namespace rlp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Below this weight no future payment can move a double accumulator.
constexpr double kWeightFloor = 1e-18;

struct PathCtx {
    const ProblemSpec& spec;
    const SimConfig& cfg;
    double target;       // c2 (policy runs) or c (exit runs)
    bool controlled;     // pay dividends at the target?
    double c1 = 0;
    double t_max;
    Philox4x64 drive;    // claims / increments
    Philox4x64 clocks;   // Parisian deadlines only, so pairing the two
                         // estimators keeps the driving noise identical

    PathCtx(const ProblemSpec& s, const SimConfig& c, std::uint64_t path)
        : spec(s), cfg(c), target(0), controlled(false),
          t_max(c.t_max > 0 ? c.t_max : default_t_max(s)),
          drive(c.seed, path, 0), clocks(c.seed, path, 1) {}

    double weight(double t, double L) const {
        return std::exp(-spec.econ.q * t - (cfg.estimator == Estimator::killing ? L : 0.0));
    }
};

PathRecord run_cl(PathCtx& ctx, double x0) {
    const auto& cl = std::get<CramerLundbergModel>(ctx.spec.model);
    const double mu = cl.mu, eta = cl.eta, alpha = cl.alpha;
    const double delta = ctx.spec.refraction.delta, b = ctx.spec.refraction.b;
    const double m = ctx.spec.econ.m, l = ctx.spec.econ.l;
    const bool clock = ctx.cfg.estimator == Estimator::clock;

    PathRecord rec;
    double t = 0, u = x0, L = 0;
    double deadline = kInf;

    if (u <= -l) {
        rec.ruin = RuinType::barrier;
        rec.ruin_time = 0;
        return rec;
    }
    if (u >= ctx.target) {
        if (ctx.controlled) {
            rec.discounted_dividends += (u - ctx.c1 - ctx.spec.econ.beta);
            u = ctx.c1;
        } else {
            rec.exit_value = 1.0;
            rec.ruin_time = kInf;
            return rec;
        }
    }
    if (u < 0 && clock) deadline = ctx.clocks.exponential(m);

    while (true) {
        double t_claim = t + ctx.drive.exponential(eta);
        // deterministic drift up to the claim, with level crossings
        bool claim_due = false;
        while (!claim_due) {
            double slope = (u >= b) ? mu - delta : mu;
            double next_level = kInf;
            if (u < 0) next_level = 0.0;
            else if (u < b && b < ctx.target) next_level = b;
            else next_level = ctx.target;
            if (next_level <= u) next_level = ctx.target;
            double t_hit = t + (next_level - u) / slope;
            double t_seg = std::min(t_hit, t_claim);

            if (u < 0) {
                if (clock && deadline <= std::min(t_seg, ctx.t_max)) {
                    rec.ruin = RuinType::parisian;
                    rec.ruin_time = deadline;
                    return rec;
                }
                if (!clock) L += m * (std::min(t_seg, ctx.t_max) - t);
            }
            if (ctx.t_max <= t_seg) {
                rec.ruin_time = kInf;
                rec.truncated = true;
                return rec;
            }
            if (t_claim <= t_hit) {
                u += slope * (t_claim - t);
                t = t_claim;
                claim_due = true;
                break;
            }
            t = t_hit;
            u = next_level;
            if (next_level == 0.0) deadline = kInf;  // excursion closed
            if (next_level == ctx.target) {
                double w = ctx.weight(t, L);
                if (ctx.controlled) {
                    rec.discounted_dividends += (ctx.target - ctx.c1 - ctx.spec.econ.beta) * w;
                    u = ctx.c1;
                    if (w < kWeightFloor) {
                        rec.ruin_time = kInf;
                        return rec;  // completed: nothing left can register
                    }
                } else {
                    rec.exit_value = clock ? std::exp(-ctx.spec.econ.q * t) : w;
                    rec.ruin_time = kInf;
                    return rec;
                }
            }
        }
        double z = ctx.drive.exponential(alpha);
        bool was_nonneg = u >= 0;
        u -= z;
        if (u < -l) {
            rec.ruin = RuinType::barrier;
            rec.ruin_time = t;
            return rec;
        }
        if (was_nonneg && u < 0 && clock) deadline = t + ctx.clocks.exponential(m);
        if (ctx.weight(t, L) < kWeightFloor) {
            rec.ruin_time = kInf;
            return rec;
        }
    }
}

PathRecord run_brownian(PathCtx& ctx, double x0) {
    const auto& bm = std::get<BrownianModel>(ctx.spec.model);
    const double mu = bm.mu, sigma = bm.sigma;
    const double delta = ctx.spec.refraction.delta, b = ctx.spec.refraction.b;
    const double m = ctx.spec.econ.m, l = ctx.spec.econ.l;
    const bool clock = ctx.cfg.estimator == Estimator::clock;
    const double dt = ctx.cfg.dt, sq = sigma * std::sqrt(dt);

    PathRecord rec;
    double t = 0, u = x0, L = 0;
    double deadline = kInf;

    if (u <= -l) {
        rec.ruin = RuinType::barrier;
        rec.ruin_time = 0;
        return rec;
    }
    if (u >= ctx.target) {
        if (ctx.controlled) {
            rec.discounted_dividends += (u - ctx.c1 - ctx.spec.econ.beta);
            u = ctx.c1;
        } else {
            rec.exit_value = 1.0;
            rec.ruin_time = kInf;
            return rec;
        }
    }
    if (u < 0 && clock) deadline = ctx.clocks.exponential(m);

    while (true) {
        if (t >= ctx.t_max) {
            rec.ruin_time = kInf;
            rec.truncated = true;
            return rec;
        }
        double z = ctx.drive.normal();
        double t2 = t + dt;
        if (u < 0) {
            if (clock && deadline <= t2) {
                rec.ruin = RuinType::parisian;
                rec.ruin_time = deadline;
                return rec;
            }
            if (!clock) L += m * dt;
        }
        double u2 = u + (u >= b ? mu - delta : mu) * dt + sq * z;
        if (u2 < -l) {
            rec.ruin = RuinType::barrier;
            rec.ruin_time = t2;
            return rec;
        }
        if (u >= 0 && u2 < 0 && clock) deadline = t2 + ctx.clocks.exponential(m);
        if (u < 0 && u2 >= 0) deadline = kInf;
        if (u2 >= ctx.target) {
            double w = ctx.weight(t2, L);
            if (ctx.controlled) {
                rec.discounted_dividends += (u2 - ctx.c1 - ctx.spec.econ.beta) * w;
                u2 = ctx.c1;
            } else {
                rec.exit_value = clock ? std::exp(-ctx.spec.econ.q * t2) : w;
                rec.ruin_time = kInf;
                return rec;
            }
        }
        u = u2;
        t = t2;
        if (ctx.weight(t, L) < kWeightFloor) {
            rec.ruin_time = kInf;
            return rec;
        }
    }
}

PathRecord run(PathCtx& ctx, double x0) {
    if (std::holds_alternative<CramerLundbergModel>(ctx.spec.model)) return run_cl(ctx, x0);
    return run_brownian(ctx, x0);
}

SimEstimate reduce(const ProblemSpec& spec, const SimConfig& cfg, std::vector<double>& vals,
                   const std::vector<char>& truncated) {
    SimEstimate est;
    est.seed = cfg.seed;
    est.n_effective = vals.size();
    const double n = double(vals.size());
    est.mean = pairwise_sum(vals) / n;
    std::vector<double> sq(vals.size());
    for (size_t i = 0; i < vals.size(); ++i) {
        double d = vals[i] - est.mean;
        sq[i] = d * d;
    }
    est.stderr_ = vals.size() > 1 ? std::sqrt(pairwise_sum(sq) / (n - 1) / n) : 0.0;
    size_t tcount = 0;
    for (char c : truncated) tcount += c != 0;
    est.truncation_fraction = tcount / n;
    (void)spec;
    return est;
}

}  // namespace

double default_t_max(const ProblemSpec& spec) {
    return spec.econ.q > 0 ? 50.0 / spec.econ.q : 1e6;
}

PathRecord simulate_path(const ProblemSpec& spec, const Policy& policy, double x0,
                         const SimConfig& config, std::uint64_t path_index) {
    require_valid(spec);
    if (!policy_valid(spec, policy)) throw std::domain_error("simulate_path: invalid policy");
    PathCtx ctx(spec, config, path_index);
    ctx.controlled = true;
    ctx.target = policy.c2;
    ctx.c1 = policy.c1;
    return run(ctx, x0);
}

PathRecord simulate_exit_path(const ProblemSpec& spec, double x0, double c,
                              const SimConfig& config, std::uint64_t path_index) {
    require_valid(spec);
    if (!(x0 >= -spec.econ.l) || !(x0 <= c))
        throw std::domain_error("simulate_exit_path: -l <= x0 <= c required");
    PathCtx ctx(spec, config, path_index);
    ctx.controlled = false;
    ctx.target = c;
    return run(ctx, x0);
}

SimEstimate estimate_value(const ProblemSpec& spec, const Policy& policy, double x0,
                           const SimConfig& config) {
    std::vector<double> vals(config.n_paths);
    std::vector<char> trunc(config.n_paths, 0);
    parallel_for(config.n_paths, [&](size_t i) {
        auto rec = simulate_path(spec, policy, x0, config, i);
        vals[i] = rec.discounted_dividends;
        trunc[i] = rec.truncated;
    });
    return reduce(spec, config, vals, trunc);
}

SimEstimate estimate_exit_laplace(const ProblemSpec& spec, double x0, double c,
                                  const SimConfig& config) {
    std::vector<double> vals(config.n_paths);
    std::vector<char> trunc(config.n_paths, 0);
    parallel_for(config.n_paths, [&](size_t i) {
        auto rec = simulate_exit_path(spec, x0, c, config, i);
        vals[i] = rec.exit_value;
        trunc[i] = rec.truncated;
    });
    return reduce(spec, config, vals, trunc);
}

}  // namespace rlp
