#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace econloop {

// Unsupported carries designs the estimators cannot run (IV, RDD, ...); the
// original label is kept on the question.
enum class Design { OLS, FixedEffects, DiD, EventStudy, Unsupported };

std::string_view to_string(Design design);
/// Maps a free-text design label to the enum; unknown labels map to Unsupported.
Design design_from_string(std::string_view text);

enum class GenerationMode { DatasetAware, Unconstrained };

std::string_view to_string(GenerationMode mode);
GenerationMode generation_mode_from_string(std::string_view text);

/// A candidate hypothesis.
///
/// Design-specific conventions for `treatment_vars`:
///  - DiD: the first name is the binary treatment-group indicator, the second
///    the binary post-period indicator.
///  - EventStudy: the first name is the event-time variable (integer periods
///    relative to treatment, missing for never-treated units).
struct ResearchQuestion {
    std::string question_id;
    std::string text;
    std::string outcome_var;
    std::vector<std::string> treatment_vars;
    std::vector<std::string> control_vars;
    Design design = Design::OLS;
    std::string design_label;
    std::string domain_tag;
    std::string rationale;

    /// outcome, treatments and controls in that order, without duplicates.
    std::vector<std::string> named_variables() const;
    bool operator==(const ResearchQuestion&) const = default;
};

enum class FailureCause { MissingVariables, IncompatibleDesign, UnsupportedMethod };

std::string_view to_string(FailureCause cause);

struct FeasibilityReport {
    std::string question_id;
    bool vars_exist = false;
    std::vector<std::string> missing_vars;
    bool design_compatible = false;
    std::string design_reason;
    bool method_supported = false;
    std::string method_reason;
    bool feasible = false;
    double tractability_score = 0.0;

    /// First failing criterion in the order vars, design, method.
    std::optional<FailureCause> first_failure() const;
    bool operator==(const FeasibilityReport&) const = default;
};

struct ScreenedCandidate {
    ResearchQuestion question;
    FeasibilityReport report;

    bool operator==(const ScreenedCandidate&) const = default;
};

/// One question-generation round, candidates in ranked order.
struct QuestionRound {
    int round = 1;
    GenerationMode mode = GenerationMode::DatasetAware;
    std::optional<std::string> constraints;
    std::vector<ScreenedCandidate> candidates;

    bool operator==(const QuestionRound&) const = default;
};

}  // namespace econloop
