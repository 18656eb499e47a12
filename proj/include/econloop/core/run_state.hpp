#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "econloop/core/analysis.hpp"
#include "econloop/core/dataset.hpp"
#include "econloop/core/manuscript.hpp"
#include "econloop/core/profile.hpp"
#include "econloop/core/question.hpp"
#include "econloop/core/review.hpp"

namespace econloop {

inline constexpr int kSchemaVersion = 1;

enum class Stage {
    Created,
    Auditing,
    Profiling,
    Questioning,
    AwaitingQuestionGate,
    Collecting,
    Analyzing,
    Writing,
    Critiquing,
    Reviewing,
    AwaitingPublicationGate,
    Revising,
    Completed,
    Halted,
    Rejected,
};

std::string_view to_string(Stage stage);
Stage stage_from_string(std::string_view text);

bool is_terminal(Stage stage);

/// The declared stage machine: the linear workflow plus the question loop
/// (AwaitingQuestionGate -> Questioning), the revision loop
/// (Reviewing -> Revising -> Analyzing | Writing) and a Halt edge from every
/// non-terminal stage.
bool is_legal_transition(Stage from, Stage to);

enum class EventKind {
    StageEntered,
    ArtifactProduced,
    GateOpened,
    GateDecided,
    LlmCall,
    EstimationError,
    Halt,
    Warning,
};

std::string_view to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view text);

struct RunEvent {
    std::int64_t timestamp_ms = 0;
    std::string actor;
    EventKind kind = EventKind::StageEntered;
    nlohmann::json payload = nlohmann::json::object();

    bool operator==(const RunEvent&) const = default;
};

enum class Gate { QuestionSelection, PublicationApproval };

std::string_view to_string(Gate gate);
Gate gate_from_string(std::string_view text);

enum class GateAction { Select, Regenerate, Approve, Reject };

std::string_view to_string(GateAction action);
GateAction gate_action_from_string(std::string_view text);

struct GateDecision {
    Gate gate = Gate::QuestionSelection;
    GateAction action = GateAction::Select;
    // Question id for Select, constraint text for Regenerate, reason for Reject.
    std::string argument;
    std::string decided_by;
    std::int64_t decided_at_ms = 0;

    static GateDecision select(std::string question_id, std::string by = "pi");
    static GateDecision regenerate(std::string constraints, std::string by = "pi");
    static GateDecision approve(std::string by = "pi");
    static GateDecision reject(std::string reason, std::string by = "pi");

    /// Same decision content, ignoring who decided and when.
    bool same_choice(const GateDecision& other) const {
        return gate == other.gate && action == other.action && argument == other.argument;
    }
    bool operator==(const GateDecision&) const = default;
};

/// Currency is integer micro-dollars; prices are micro-dollars per token.
struct LedgerEntry {
    std::string agent;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    std::int64_t input_price = 0;
    std::int64_t output_price = 0;
    std::int64_t cost = 0;

    bool operator==(const LedgerEntry&) const = default;
};

struct CostLedger {
    std::vector<LedgerEntry> entries;
    std::int64_t total = 0;

    const LedgerEntry& add(std::string agent, std::int64_t input_tokens, std::int64_t output_tokens,
                           std::int64_t input_price, std::int64_t output_price);
    std::int64_t recompute_total() const;
    bool operator==(const CostLedger&) const = default;
};

struct SampleStep {
    std::string step;
    std::size_t rows = 0;

    bool operator==(const SampleStep&) const = default;
};

struct SampleReport {
    std::vector<SampleStep> steps;

    std::size_t final_rows() const { return steps.empty() ? 0 : steps.back().rows; }
    bool operator==(const SampleReport&) const = default;
};

struct RunState {
    std::string run_id;
    std::int64_t created_at_ms = 0;
    Stage stage = Stage::Created;
    int question_round = 1;
    int revision_iteration = 0;
    nlohmann::json config = nlohmann::json::object();
    std::optional<DatasetAudit> audit;
    std::optional<DataProfile> profile;
    std::vector<QuestionRound> candidates;
    std::optional<std::string> selected_question;
    std::optional<AnalysisPlan> plan;
    std::optional<SampleReport> sample_report;
    std::vector<AnalysisResult> analyses;
    std::vector<Draft> drafts;
    std::vector<CritiqueNote> critiques;
    std::vector<ReviewReport> reviews;
    std::vector<GateDecision> decisions;
    std::optional<std::string> rejection_reason;
    CostLedger cost;
    std::vector<RunEvent> events;

    /// Appends an event, clamping its timestamp so the log stays monotone.
    const RunEvent& record(std::string actor, EventKind kind,
                           nlohmann::json payload = nlohmann::json::object());
    /// Moves to `next` and logs StageEntered; throws IntegrityError on an
    /// illegal transition.
    void enter(Stage next);

    const QuestionRound* current_round() const;
    const ScreenedCandidate* find_candidate(std::string_view question_id) const;
    const ScreenedCandidate* selected() const;
    bool operator==(const RunState&) const = default;
};

std::int64_t now_ms();

/// Replays StageEntered events from Created, checking every edge against the
/// stage machine. Returns the final stage or throws IntegrityError.
Stage replay_stages(const std::vector<RunEvent>& events);

/// Checks every RunState invariant; throws IntegrityError naming the first
/// violated one.
void validate(const RunState& state);

}  // namespace econloop
