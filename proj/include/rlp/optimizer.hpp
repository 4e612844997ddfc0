#pragma once
// Minimization of H over dom(H): a level-set solve on the two monotone
// branches of theta', the boundary-case candidates, and a brute-force grid
// referee for verification.

#include <optional>
#include <string>
#include <vector>

#include "rlp/valuation.hpp"

namespace rlp {

enum class PolicyCase { interior, c1_at_b, c1_at_0, c2_at_b, corner_0_b };

const char* to_string(PolicyCase c);

struct SearchBox {
    double c1_max;
    double c2_max;
    int doublings;  // how many expansions were needed
};

struct OptimizerResult {
    Policy policy{};
    PolicyCase kase = PolicyCase::interior;
    double h_value = 0;
    // Case-specific relative stationarity residuals:
    //   interior: { |theta'(c1)-theta'(c2)|/H, |theta'(c2)-H|/H }
    //   c1_at_0 / c1_at_b: { |theta'(c2)-H|/H }
    //   c2_at_b:           { |theta'(c1)-H|/H }
    //   corner_0_b:        {} (no analytic certificate exists for this case)
    std::vector<double> first_order_residuals;
    SearchBox box{};
    bool near_b_flag = false;        // BV optimum within 1e-6 of c2 = b
    bool tie_flag = false;           // another candidate ties H within 1e-9 relative
    std::optional<Policy> tie_with;
};

// Expands c2_max by doubling from max(b, l, 10 beta) until H on the c2 = c2_max
// boundary exceeds twice the best interior value seen; c1_max = c2_max.
// Throws after 60 doublings.
SearchBox search_box(const ThetaBasis& basis);

// Deterministic level-set + boundary-case solve. Requires q > 0.
OptimizerResult optimize(const ThetaBasis& basis);

struct OptimalityReport {
    bool deriv_monotone_ok = false;   // theta' nondecreasing on [c2*, c2*+5l]
    bool hjb_pattern_ok = false;      // residual ~ 0 below c2*, <= tol above
    bool random_probe_ok = false;     // H(result) <= H(p) for random p in the box
    double worst_hjb_interior = 0;
    double worst_hjb_above = 0;
    double best_probe_h = 0;
    bool ok() const { return deriv_monotone_ok && hjb_pattern_ok && random_probe_ok; }
};

OptimalityReport verify_optimality(const ThetaBasis& basis, const OptimizerResult& result,
                                   int n_random = 10000, unsigned long long seed = 20240901ULL);

// Brute-force 2-D grid minimization of H; the acceptance referee.
struct GridOracleResult {
    Policy policy{};
    double h_value = 0;
    int coarse_basins = 0;  // strict local minima of H on the coarse grid
};
GridOracleResult grid_oracle(const ThetaBasis& basis, double coarse_step = 1e-2,
                             double fine_step = 1e-4);

struct SweepRow {
    double param_value = 0;
    Policy policy{};
    double h_value = 0;
    PolicyCase kase = PolicyCase::interior;
    std::string error;  // non-empty when this point failed
};

enum class SweepParam { beta, delta, b, l, m, q };
SweepParam sweep_param_from_string(const std::string& name);
const char* to_string(SweepParam p);

// Re-optimizes at n evenly spaced values of one parameter. Points run
// concurrently; per-point failures are recorded and the sweep continues.
std::vector<SweepRow> sweep(const ProblemSpec& base, SweepParam param, double lo, double hi, int n);

}  // namespace rlp
