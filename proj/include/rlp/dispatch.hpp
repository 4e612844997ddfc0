#pragma once
// Subcommand surface shared by the CLI binary and the tests.

#include <string>
#include <vector>

#include "rlp/simulator.hpp"

namespace rlp {

// Runs one subcommand. Returns the process exit status:
//   0 success, 1 validation/usage failure, 2 numerical nonconvergence.
int dispatch(const std::vector<std::string>& args);

// Default comparison points used by `compare` and the acceptance suite.
struct ComparePoint {
    double x0;
    double level;  // exit: target c; value: unused
    Policy policy; // value runs
};
std::vector<ComparePoint> default_exit_points(const ProblemSpec& spec);
std::vector<ComparePoint> default_value_points(const ProblemSpec& spec, const Policy& optimal);

}  // namespace rlp
