#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace fedprune {

struct CheckResult {
    bool pass = false;
    std::string detail;
};

struct Check {
    std::string name;
    std::function<CheckResult()> fn;
};

/// The verification suite: oracle-equivalence, exactness, identity and
/// directional checks the engine must satisfy end to end.
const std::vector<Check>& acceptance_checks();

/// Runs every check whose name contains `filter` (all when empty), printing
/// one PASS/FAIL line each. Returns the number of failures.
int run_acceptance_checks(std::string_view filter, std::ostream& out);

}  // namespace fedprune
