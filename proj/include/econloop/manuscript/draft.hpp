#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "econloop/core/analysis.hpp"
#include "econloop/core/error.hpp"
#include "econloop/core/manuscript.hpp"
#include "econloop/core/profile.hpp"
#include "econloop/core/question.hpp"
#include "econloop/core/review.hpp"
#include "econloop/core/run_state.hpp"
#include "econloop/llm/backend.hpp"

namespace econloop::manuscript {

class DraftingError : public Error {
public:
    explicit DraftingError(const std::string& message) : Error("DraftingError", message) {}
};

/// Count of maximal non-whitespace runs once fenced code blocks are removed.
std::size_t word_count(std::string_view body);

/// Removes ``` fenced blocks (fence lines included).
std::string strip_fenced_blocks(std::string_view body);

/// Presence of Abstract, Introduction, Methodology (or Empirical Strategy),
/// Results and Discussion among the markdown headings, in that order.
std::vector<Section> check_sections(std::string_view body);
bool all_present(const std::vector<Section>& sections);

/// Decimal numerals in the prose that match no reported value of `results`
/// at the precision printed (signs ignored). Headings and fenced blocks are
/// not scanned.
std::vector<std::string> unsupported_numerals(std::string_view body, const std::vector<AnalysisResult>& results);

struct DraftContext {
    const ResearchQuestion* question = nullptr;
    const DataProfile* profile = nullptr;
    const SampleReport* sample = nullptr;
    const std::vector<AnalysisResult>* results = nullptr;
    // When revising: the latest draft and its review.
    const Draft* prior = nullptr;
    const ReviewReport* prior_review = nullptr;
};

llm::LlmRequest build_draft_prompt(const DraftContext& ctx, int version);

/// Produces version prior.version + 1 (or 1). Missing headings trigger one
/// re-prompt; a second failure or an empty body raises DraftingError.
Draft draft(const DraftContext& ctx, llm::LlmBackend& backend);

/// Rewrites `current` in place after a Major self-critique; the version does
/// not change and `redrafted_after_critique` is set.
Draft redraft_after_critique(const DraftContext& ctx, const Draft& current, const CritiqueNote& critique,
                             llm::LlmBackend& backend);

}  // namespace econloop::manuscript
