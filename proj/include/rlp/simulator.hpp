#pragma once
// Monte Carlo oracle for the controlled refracted process with Parisian
// exponential clocks and the bankruptcy barrier. Cramer-Lundberg paths are
// event-driven and exact; Brownian paths use an Euler grid with the usual
// O(sqrt(dt)) barrier-crossing bias.

#include <cstdint>
#include <optional>

#include "rlp/valuation.hpp"

namespace rlp {

// `clock` draws a fresh exp(m) deadline at each downcrossing of zero and
// declares ruin when an excursion outlives it; `killing` never declares
// Parisian ruin but weights payoffs by e^{-L(t)} with L accruing at rate m
// below zero. The two estimate the same functionals.
enum class Estimator { clock, killing };

struct SimConfig {
    std::uint64_t n_paths = 10000;
    std::uint64_t seed = 1;
    double dt = 1e-3;    // Euler step (Brownian only)
    double t_max = 0;    // horizon cap; 0 means 50/q
    Estimator estimator = Estimator::killing;
};

double default_t_max(const ProblemSpec& spec);

enum class RuinType { none, parisian, barrier };

struct PathRecord {
    double ruin_time = 0;  // +inf when the path ended without ruin
    RuinType ruin = RuinType::none;
    double discounted_dividends = 0;  // sum of weighted (amount - beta) payments
    double exit_value = 0;            // weighted indicator for exit runs
    bool truncated = false;           // ended at t_max with material weight left
};

struct SimEstimate {
    double mean = 0;
    double stderr_ = 0;
    std::uint64_t n_effective = 0;
    double truncation_fraction = 0;
    std::uint64_t seed = 0;
};

// One controlled path under the (c1, c2) impulse policy. The path ends at
// ruin, at t_max, or when the discount-killing weight falls below any
// representable contribution (recorded as completed, not truncated).
// Starting at or below -l is immediate ruin by convention.
PathRecord simulate_path(const ProblemSpec& spec, const Policy& policy, double x0,
                         const SimConfig& config, std::uint64_t path_index);

// One uncontrolled path run until it reaches level c (exit) or ruins.
PathRecord simulate_exit_path(const ProblemSpec& spec, double x0, double c,
                              const SimConfig& config, std::uint64_t path_index);

// Mean discounted net dividends under the policy, from x0.
SimEstimate estimate_value(const ProblemSpec& spec, const Policy& policy, double x0,
                           const SimConfig& config);

// E[e^{-q k_c^+} 1{exit before ruin}] for the uncontrolled process.
SimEstimate estimate_exit_laplace(const ProblemSpec& spec, double x0, double c,
                                  const SimConfig& config);

}  // namespace rlp
