#pragma once
// Risk-model parameterization: spectrally negative Levy models (Brownian with
// drift, Cramer-Lundberg with exponential claims), refraction, and the
// economic parameters of the Parisian-ruin dividend problem.

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace rlp {

// Underlying process selector: X is the base risk process, Y = X - delta*t is
// the refracted regime active at or above the threshold b.
enum class Process { X, Y };

struct BrownianModel {
    double mu;     // drift per unit time, > 0
    double sigma;  // volatility per sqrt-time, > 0 (unbounded-variation case)
};

struct CramerLundbergModel {
    double mu;     // premium rate per unit time, > 0
    double eta;    // claim arrival rate per unit time, > 0
    double alpha;  // inverse mean claim size, > 0 (claims ~ exp(alpha))
};

using LevyModel = std::variant<BrownianModel, CramerLundbergModel>;

struct Refraction {
    double delta;  // drift reduction applied at or above b, >= 0
    double b;      // threshold level (solvency capital), >= 0
};

struct Econ {
    double q;     // discount rate per unit time, >= 0
    double m;     // Parisian exponential-delay rate, >= 0
    double l;     // bankruptcy barrier depth: absorbing barrier at -l, l > 0
    double beta;  // fixed transaction cost per dividend payment, > 0
};

struct ProblemSpec {
    LevyModel model;
    Refraction refraction;
    Econ econ;

    bool is_bounded_variation() const {
        return std::holds_alternative<CramerLundbergModel>(model);
    }
};

// Report-style validation: collects every violated invariant by name.
struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate(const ProblemSpec& spec);

// Throws std::invalid_argument naming the first violated rule.
void require_valid(const ProblemSpec& spec);

// Laplace exponent psi(lambda) of X, or psi(lambda) - delta*lambda for Y.
// Only lambda >= 0 is accepted (the Cramer-Lundberg exponent has a pole at
// -alpha, and nothing here needs negative arguments).
double laplace_exponent(const ProblemSpec& spec, double lambda, Process p);

// Largest nonnegative root of psi_p(lambda) = q. Bracket by doubling, then
// bisect to 1e-14 absolute; psi is convex and increasing past the root, so
// the bracket is safe under the net-profit condition.
double phi_inverse(const ProblemSpec& spec, double q, Process p);

double drift_of(const ProblemSpec& spec, Process p);

}  // namespace rlp
