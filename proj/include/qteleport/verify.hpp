#pragma once

// Built-in property-verification suite behind `qtel verify`: runs every
// module's invariant checks at a caller-chosen sample size. On failure, the
// first offending state is serialized so the case can be replayed through the
// CLI.

#include <string>
#include <vector>

namespace qtel {

struct CheckResult {
    std::string name;
    bool passed = true;
    std::string detail;  // worst observed value vs. bound
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool all_passed = true;
    std::string failing_state_json;  // first failing case, empty if none
};

VerifyReport run_verification(int n_states = 200, unsigned seed = 1234);

}  // namespace qtel
