#pragma once

#include <string>
#include <vector>

#include "envtiming/config.hpp"

namespace envtiming {

struct CheckResult {
    std::string name;
    bool passed;
    std::string detail;
};

/**
 * Fast invariant suite behind the `check` subcommand: constants, closed-form
 * identities, transform round trip, belief martingale and q/m properties for the
 * configured model. Runs in a few seconds.
 */
std::vector<CheckResult> run_fast_checks(const RunConfig& cfg);

} // namespace envtiming
