#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace econloop {

enum class Dimension { Novelty, Identification, DataQuality, Clarity, PolicyRelevance };

inline constexpr std::array<Dimension, 5> kDimensions = {
    Dimension::Novelty, Dimension::Identification, Dimension::DataQuality, Dimension::Clarity,
    Dimension::PolicyRelevance};

/// snake_case key used in review JSON ("novelty", "identification", ...).
std::string_view dimension_key(Dimension d);

enum class RequestKind { RobustnessCheck, IdentificationDiscussion, VariableDescription, Exposition, Other };

std::string_view to_string(RequestKind kind);
RequestKind request_kind_from_string(std::string_view text);

struct RevisionRequest {
    RequestKind kind = RequestKind::Other;
    std::string text;

    bool operator==(const RevisionRequest&) const = default;
};

enum class Verdict { Accept, Revise };

std::string_view to_string(Verdict verdict);

struct ReviewReport {
    int draft_version = 1;
    std::array<double, 5> scores{};  // indexed like kDimensions, each in [1, 10]
    double overall = 0.0;
    std::vector<RevisionRequest> revision_requests;
    Verdict verdict = Verdict::Revise;
    // Accept was forced by the iteration budget rather than by the score.
    bool budget_exhausted = false;

    double score(Dimension d) const { return scores[static_cast<std::size_t>(d)]; }
    bool operator==(const ReviewReport&) const = default;
};

enum class Severity { Minor, Major };

std::string_view to_string(Severity severity);

struct CritiqueNote {
    int draft_version = 1;
    std::vector<std::string> issues;
    Severity severity = Severity::Minor;

    bool operator==(const CritiqueNote&) const = default;
};

}  // namespace econloop
