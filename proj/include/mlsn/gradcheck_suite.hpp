#pragma once

#include <string>
#include <vector>

namespace mlsn {

struct GradCheckResult {
    std::string name;
    double max_rel_error = 0.0;
    bool passed = false;
};

inline constexpr double kGradCheckTolerance = 1e-5;

// Central finite-difference checks: one row per primitive op, plus every
// loss composed through the full network stack.
std::vector<GradCheckResult> run_gradcheck_suite();

}  // namespace mlsn
