#include "rlp/problem.hpp"

namespace rlp {

double drift_of(const ProblemSpec& spec, Process p) {
    double base = std::visit([](const auto& m) { return m.mu; }, spec.model);
    return p == Process::Y ? base - spec.refraction.delta : base;
}

ValidationReport validate(const ProblemSpec& spec) {
    ValidationReport rep;
    auto add = [&](const std::string& s) { rep.violations.push_back(s); };

    if (const auto* bm = std::get_if<BrownianModel>(&spec.model)) {
        if (!(bm->mu > 0)) add("brownian: mu > 0");
        if (!(bm->sigma > 0)) add("brownian: sigma > 0");
    } else {
        const auto& cl = std::get<CramerLundbergModel>(spec.model);
        if (!(cl.mu > 0)) add("cramer_lundberg: mu > 0");
        if (!(cl.eta > 0)) add("cramer_lundberg: eta > 0");
        if (!(cl.alpha > 0)) add("cramer_lundberg: alpha > 0");
        // Bounded variation keeps part of the drift: delta < mu.
        if (!(spec.refraction.delta < cl.mu))
            add("drift retention: delta < mu (bounded-variation case)");
    }

    if (!(spec.refraction.delta >= 0)) add("refraction: delta >= 0");
    if (!(spec.refraction.b >= 0)) add("refraction: b >= 0");

    // Net profit / positive security loading: psi'(0+) - delta >= 0.
    double mean_drift = 0;
    if (const auto* bm = std::get_if<BrownianModel>(&spec.model)) {
        mean_drift = bm->mu;
    } else {
        const auto& cl = std::get<CramerLundbergModel>(spec.model);
        mean_drift = cl.mu - cl.eta / cl.alpha;
    }
    if (!(mean_drift - spec.refraction.delta >= 0))
        add("net profit: psi'(0+) - delta >= 0");

    if (!(spec.econ.q >= 0)) add("econ: q >= 0");
    if (!(spec.econ.m >= 0)) add("econ: m >= 0");
    if (!(spec.econ.l > 0)) add("econ: l > 0");
    if (!(spec.econ.beta > 0)) add("econ: beta > 0");
    return rep;
}

void require_valid(const ProblemSpec& spec) {
    auto rep = validate(spec);
    if (!rep.ok()) throw std::invalid_argument("invalid problem: " + rep.violations.front());
}

double laplace_exponent(const ProblemSpec& spec, double lambda, Process p) {
    if (!(lambda >= 0)) throw std::domain_error("laplace_exponent: lambda >= 0 required");
    double psi = 0;
    if (const auto* bm = std::get_if<BrownianModel>(&spec.model)) {
        psi = bm->mu * lambda + 0.5 * bm->sigma * bm->sigma * lambda * lambda;
    } else {
        const auto& cl = std::get<CramerLundbergModel>(spec.model);
        psi = cl.mu * lambda + cl.eta * (cl.alpha / (lambda + cl.alpha) - 1.0);
    }
    if (p == Process::Y) psi -= spec.refraction.delta * lambda;
    return psi;
}

double phi_inverse(const ProblemSpec& spec, double q, Process p) {
    if (!(q >= 0)) throw std::domain_error("phi_inverse: q >= 0 required");
    if (q == 0) return 0.0;  // net-profit condition gives psi'(0+) >= 0
    double hi = 1.0;
    while (laplace_exponent(spec, hi, p) <= q) {
        hi *= 2;
        if (hi > 1e12) throw std::runtime_error("phi_inverse: bracket not found");
    }
    double lo = 0.0;
    while (hi - lo > 1e-14) {
        double mid = 0.5 * (lo + hi);
        (laplace_exponent(spec, mid, p) < q ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace rlp
