#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vicinal::harness {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    bool skipped = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs the fifteen acceptance checks. Quick mode skips the long runs and marks them.
/// When `log` is set, each line is printed as soon as its check finishes. A nonzero `only`
/// returns that single criterion; the two checks that aggregate over every run (5 and 8)
/// still execute the whole suite.
std::vector<CriterionResult> run_acceptance(bool quick, std::ostream* log = nullptr, int only = 0);

/// "AC07 PASS  small-set measure bound: ..." or "... SKIP ..." / "... FAIL ...".
std::string format_line(const CriterionResult& r);

/// True when nothing failed (skips do not count as failures).
bool all_passed(const std::vector<CriterionResult>& results);

} // namespace vicinal::harness
