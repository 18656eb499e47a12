#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "econloop/core/analysis.hpp"
#include "econloop/core/error.hpp"
#include "econloop/core/manuscript.hpp"
#include "econloop/core/review.hpp"
#include "econloop/llm/backend.hpp"

namespace econloop::reviewer {

class ReviewError : public Error {
public:
    explicit ReviewError(const std::string& message) : Error("ReviewError", message) {}
};

struct ReviewOptions {
    double accept_threshold = 6.0;
    int max_iterations = 4;
    double no_improvement_margin = 0.5;
};

/// Arithmetic mean of the five dimension scores.
double overall_score(const std::array<double, 5>& scores);

/// Builds a report from parsed review JSON; throws ReviewError for a score
/// outside [1, 10].
ReviewReport report_from_json(const nlohmann::json& j, int draft_version);

/// Scores `draft`. `prior_reviews` is the number of reports already in the
/// run; when this review exhausts the iteration budget the verdict is Accept
/// with `budget_exhausted` set. A parse failure or out-of-range score gets
/// one re-prompt, then ReviewError.
ReviewReport review(const Draft& draft, const std::vector<AnalysisResult>& results, llm::LlmBackend& backend,
                    const ReviewOptions& options = {}, int prior_reviews = 0);

enum class StopReason { Accepted, BudgetExhausted, NoImprovement };

std::string_view to_string(StopReason reason);

struct LoopDecision {
    bool stop = false;
    std::optional<StopReason> reason;
};

/// Accepted (latest verdict Accept on the score), else BudgetExhausted
/// (reports >= max_iterations), else NoImprovement (latest overall at least
/// `margin` below the previous one), else Continue.
LoopDecision should_continue(const std::vector<ReviewReport>& reports, int max_iterations = 4, double margin = 0.5);

struct CritiqueOutcome {
    std::optional<CritiqueNote> note;
    std::optional<std::string> warning;  // set when the critique was skipped
};

/// Pre-review critique pass. Unusable output is not fatal: the note is empty
/// and `warning` says why.
CritiqueOutcome self_critique(const Draft& draft, const std::vector<AnalysisResult>& results,
                              llm::LlmBackend& backend);

}  // namespace econloop::reviewer
