#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "econloop/core/analysis.hpp"
#include "econloop/core/dataset.hpp"
#include "econloop/core/profile.hpp"
#include "econloop/core/question.hpp"
#include "econloop/core/review.hpp"
#include "econloop/core/run_state.hpp"

namespace econloop {

namespace {

template <typename E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

template <typename E, std::size_t N>
std::string_view name_of(const NameTable<E, N>& table, E value) {
    for (const auto& [e, name] : table)
        if (e == value) return name;
    return "?";
}

template <typename E, std::size_t N>
E parse_name(const NameTable<E, N>& table, std::string_view text, const char* what) {
    for (const auto& [e, name] : table)
        if (name == text) return e;
    throw std::invalid_argument(std::string("unknown ") + what + " '" + std::string(text) + "'");
}

constexpr NameTable<ValueKind, 7> kValueKinds{{
    {ValueKind::Numeric, "Numeric"},
    {ValueKind::Integer, "Integer"},
    {ValueKind::Categorical, "Categorical"},
    {ValueKind::Binary, "Binary"},
    {ValueKind::Identifier, "Identifier"},
    {ValueKind::TimeIndex, "TimeIndex"},
    {ValueKind::Text, "Text"},
}};

constexpr NameTable<TransformKind, 3> kTransforms{{
    {TransformKind::LogTransform, "LogTransform"},
    {TransformKind::Standardize, "Standardize"},
    {TransformKind::BinaryRecode, "BinaryRecode"},
}};

constexpr NameTable<Design, 5> kDesigns{{
    {Design::OLS, "OLS"},
    {Design::FixedEffects, "FixedEffects"},
    {Design::DiD, "DiD"},
    {Design::EventStudy, "EventStudy"},
    {Design::Unsupported, "Unsupported"},
}};

constexpr NameTable<GenerationMode, 2> kModes{{
    {GenerationMode::DatasetAware, "DatasetAware"},
    {GenerationMode::Unconstrained, "Unconstrained"},
}};

constexpr NameTable<FailureCause, 3> kCauses{{
    {FailureCause::MissingVariables, "MissingVariables"},
    {FailureCause::IncompatibleDesign, "IncompatibleDesign"},
    {FailureCause::UnsupportedMethod, "UnsupportedMethod"},
}};

constexpr NameTable<SeType, 3> kSeTypes{{
    {SeType::Classical, "Classical"},
    {SeType::HC1, "HC1"},
    {SeType::ClusterRobust, "ClusterRobust"},
}};

constexpr NameTable<Dimension, 5> kDimensionKeys{{
    {Dimension::Novelty, "novelty"},
    {Dimension::Identification, "identification"},
    {Dimension::DataQuality, "data_quality"},
    {Dimension::Clarity, "clarity"},
    {Dimension::PolicyRelevance, "policy_relevance"},
}};

constexpr NameTable<RequestKind, 5> kRequestKinds{{
    {RequestKind::RobustnessCheck, "RobustnessCheck"},
    {RequestKind::IdentificationDiscussion, "IdentificationDiscussion"},
    {RequestKind::VariableDescription, "VariableDescription"},
    {RequestKind::Exposition, "Exposition"},
    {RequestKind::Other, "Other"},
}};

constexpr NameTable<Verdict, 2> kVerdicts{{{Verdict::Accept, "Accept"}, {Verdict::Revise, "Revise"}}};

constexpr NameTable<Severity, 2> kSeverities{{{Severity::Minor, "Minor"}, {Severity::Major, "Major"}}};

constexpr NameTable<Stage, 15> kStages{{
    {Stage::Created, "Created"},
    {Stage::Auditing, "Auditing"},
    {Stage::Profiling, "Profiling"},
    {Stage::Questioning, "Questioning"},
    {Stage::AwaitingQuestionGate, "AwaitingQuestionGate"},
    {Stage::Collecting, "Collecting"},
    {Stage::Analyzing, "Analyzing"},
    {Stage::Writing, "Writing"},
    {Stage::Critiquing, "Critiquing"},
    {Stage::Reviewing, "Reviewing"},
    {Stage::AwaitingPublicationGate, "AwaitingPublicationGate"},
    {Stage::Revising, "Revising"},
    {Stage::Completed, "Completed"},
    {Stage::Halted, "Halted"},
    {Stage::Rejected, "Rejected"},
}};

constexpr NameTable<EventKind, 8> kEventKinds{{
    {EventKind::StageEntered, "StageEntered"},
    {EventKind::ArtifactProduced, "ArtifactProduced"},
    {EventKind::GateOpened, "GateOpened"},
    {EventKind::GateDecided, "GateDecided"},
    {EventKind::LlmCall, "LlmCall"},
    {EventKind::EstimationError, "EstimationError"},
    {EventKind::Halt, "Halt"},
    {EventKind::Warning, "Warning"},
}};

constexpr NameTable<Gate, 2> kGates{{
    {Gate::QuestionSelection, "QuestionSelection"},
    {Gate::PublicationApproval, "PublicationApproval"},
}};

constexpr NameTable<GateAction, 4> kGateActions{{
    {GateAction::Select, "Select"},
    {GateAction::Regenerate, "Regenerate"},
    {GateAction::Approve, "Approve"},
    {GateAction::Reject, "Reject"},
}};

std::string normalized(std::string_view text) {
    std::string out;
    for (char c : text)
        if (std::isalnum(static_cast<unsigned char>(c)))
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

}  // namespace

std::string_view to_string(ValueKind kind) { return name_of(kValueKinds, kind); }
ValueKind value_kind_from_string(std::string_view text) { return parse_name(kValueKinds, text, "value kind"); }

std::string_view to_string(TransformKind kind) { return name_of(kTransforms, kind); }
TransformKind transform_kind_from_string(std::string_view text) {
    return parse_name(kTransforms, text, "transform");
}

std::string_view to_string(Design design) { return name_of(kDesigns, design); }

Design design_from_string(std::string_view text) {
    const std::string key = normalized(text);
    if (key == "ols" || key == "ordinaryleastsquares" || key == "pooledols") return Design::OLS;
    if (key == "fixedeffects" || key == "fe" || key == "panelfixedeffects" || key == "twowayfixedeffects")
        return Design::FixedEffects;
    if (key == "did" || key == "differenceindifferences" || key == "diffindiff") return Design::DiD;
    if (key == "eventstudy") return Design::EventStudy;
    return Design::Unsupported;
}

std::string_view to_string(GenerationMode mode) { return name_of(kModes, mode); }
GenerationMode generation_mode_from_string(std::string_view text) {
    return parse_name(kModes, text, "generation mode");
}

std::string_view to_string(FailureCause cause) { return name_of(kCauses, cause); }

std::string_view to_string(SeType se) { return name_of(kSeTypes, se); }
SeType se_type_from_string(std::string_view text) { return parse_name(kSeTypes, text, "se type"); }

std::string_view dimension_key(Dimension d) { return name_of(kDimensionKeys, d); }

std::string_view to_string(RequestKind kind) { return name_of(kRequestKinds, kind); }

RequestKind request_kind_from_string(std::string_view text) {
    const std::string key = normalized(text);
    for (const auto& [kind, name] : kRequestKinds)
        if (normalized(name) == key) return kind;
    return RequestKind::Other;
}

std::string_view to_string(Verdict verdict) { return name_of(kVerdicts, verdict); }
std::string_view to_string(Severity severity) { return name_of(kSeverities, severity); }

std::string_view to_string(Stage stage) { return name_of(kStages, stage); }
Stage stage_from_string(std::string_view text) { return parse_name(kStages, text, "stage"); }

std::string_view to_string(EventKind kind) { return name_of(kEventKinds, kind); }
EventKind event_kind_from_string(std::string_view text) { return parse_name(kEventKinds, text, "event kind"); }

std::string_view to_string(Gate gate) { return name_of(kGates, gate); }
Gate gate_from_string(std::string_view text) { return parse_name(kGates, text, "gate"); }

std::string_view to_string(GateAction action) { return name_of(kGateActions, action); }
GateAction gate_action_from_string(std::string_view text) {
    return parse_name(kGateActions, text, "gate action");
}

// Small member functions that have no better home.

const VariableInfo* DatasetAudit::find(std::string_view name) const {
    auto it = std::find_if(variables.begin(), variables.end(), [&](const auto& v) { return v.name == name; });
    return it == variables.end() ? nullptr : &*it;
}

const VariableProfile* DataProfile::find(std::string_view name) const {
    auto it = std::find_if(variable_profiles.begin(), variable_profiles.end(),
                           [&](const auto& v) { return v.name == name; });
    return it == variable_profiles.end() ? nullptr : &*it;
}

const Correlation* DataProfile::find_correlation(std::string_view a, std::string_view b) const {
    for (const auto& c : correlations)
        if ((c.var_a == a && c.var_b == b) || (c.var_a == b && c.var_b == a)) return &c;
    return nullptr;
}

std::vector<std::string> ResearchQuestion::named_variables() const {
    std::vector<std::string> out;
    auto add = [&](const std::string& name) {
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    };
    add(outcome_var);
    for (const auto& t : treatment_vars) add(t);
    for (const auto& c : control_vars) add(c);
    return out;
}

std::optional<FailureCause> FeasibilityReport::first_failure() const {
    if (!vars_exist) return FailureCause::MissingVariables;
    if (!design_compatible) return FailureCause::IncompatibleDesign;
    if (!method_supported) return FailureCause::UnsupportedMethod;
    return std::nullopt;
}

std::vector<std::string> Specification::variables() const {
    std::vector<std::string> out;
    auto add = [&](const std::string& name) {
        if (!name.empty() && std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    };
    add(outcome);
    for (const auto& r : regressors) add(r);
    if (did_fields) {
        add(did_fields->treat_var);
        add(did_fields->post_var);
    }
    if (event_fields) add(event_fields->event_time_var);
    if (cluster_var) add(*cluster_var);
    return out;
}

bool Coefficient::operator==(const Coefficient& o) const {
    auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
    return name == o.name && same(estimate, o.estimate) && same(std_error, o.std_error) &&
           same(t_stat, o.t_stat) && same(p_value, o.p_value) && same(ci_low, o.ci_low) &&
           same(ci_high, o.ci_high) && event_time == o.event_time;
}

const Coefficient* AnalysisResult::find(std::string_view name) const {
    auto it = std::find_if(coefficients.begin(), coefficients.end(), [&](const auto& c) { return c.name == name; });
    return it == coefficients.end() ? nullptr : &*it;
}

}  // namespace econloop
