#pragma once
// Shared test fixtures: the two worked parameter sets from the numerical
// study, one per path regime.

#include "rlp/problem.hpp"

namespace rlp::testing {

inline ProblemSpec brownian_spec() {
    ProblemSpec s;
    s.model = BrownianModel{0.5, 0.75};
    s.refraction = {0.03, 3.0};
    s.econ = {0.05, 0.05, 6.0, 1.0};
    return s;
}

inline ProblemSpec cl_spec() {
    ProblemSpec s;
    s.model = CramerLundbergModel{3.0, 2.0, 1.0};
    s.refraction = {0.15, 6.0};
    s.econ = {0.05, 0.5, 6.0, 0.1};
    return s;
}

}  // namespace rlp::testing
