#pragma once

#include <string>
#include <vector>

namespace tshuffle {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Runs one numbered acceptance criterion (1..11).
CriterionResult run_criterion(int id);

/// Runs all criteria in order.
std::vector<CriterionResult> run_all_criteria();

/// The marginal-faithfulness battery alone (criterion 9), for `validate`.
CriterionResult run_marginal_validation();

}  // namespace tshuffle
