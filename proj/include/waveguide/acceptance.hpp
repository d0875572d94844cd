#pragma once

#include <string>
#include <vector>

namespace wg {

// One gate of the validation suite. `limit_seconds` <= 0 means the gate has
// no runtime budget; otherwise exceeding it fails the gate.
struct CriterionResult {
    int index = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    double limit_seconds = 0.0;
    std::string detail;
};

// Runs the nine validation gates at the reference geometry (beta = pi/3,
// alpha = pi/30 where a first turn is involved). Exceptions inside a gate
// mark it failed with the message in `detail`; the suite always returns all
// nine results.
std::vector<CriterionResult> run_acceptance();

bool all_pass(const std::vector<CriterionResult>& results);

} // namespace wg
