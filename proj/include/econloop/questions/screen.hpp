#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "econloop/core/dataset.hpp"
#include "econloop/core/profile.hpp"
#include "econloop/core/question.hpp"

namespace econloop::questions {

FeasibilityReport screen(const ResearchQuestion& question, const DatasetAudit& audit, const DataProfile& profile);

/// Feasible candidates by tractability (descending, ties by id in natural
/// order: q2 before q10), then infeasible ones in their original order.
std::vector<ScreenedCandidate> rank(std::vector<ScreenedCandidate> candidates);

/// q2 < q10; falls back to plain string order for non-numeric suffixes.
bool natural_less(const std::string& a, const std::string& b);

struct FeasibilityStats {
    std::size_t n_questions = 0;
    std::size_t n_feasible = 0;
    double share = 0.0;
    long percent = 0;  // share rounded to an integer percentage
    std::size_t missing_variables = 0;
    std::size_t incompatible_design = 0;
    std::size_t unsupported_method = 0;
};

FeasibilityStats feasibility_stats(const std::vector<QuestionRound>& rounds);

}  // namespace econloop::questions
