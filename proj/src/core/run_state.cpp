#include "econloop/core/run_state.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <string>

#include "econloop/core/error.hpp"

namespace econloop {

std::int64_t now_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

bool is_terminal(Stage stage) {
    return stage == Stage::Completed || stage == Stage::Halted || stage == Stage::Rejected;
}

bool is_legal_transition(Stage from, Stage to) {
    if (is_terminal(from)) return false;
    if (to == Stage::Halted) return true;
    switch (from) {
        case Stage::Created: return to == Stage::Auditing;
        case Stage::Auditing: return to == Stage::Profiling;
        case Stage::Profiling: return to == Stage::Questioning;
        case Stage::Questioning: return to == Stage::AwaitingQuestionGate;
        case Stage::AwaitingQuestionGate: return to == Stage::Collecting || to == Stage::Questioning;
        case Stage::Collecting: return to == Stage::Analyzing;
        case Stage::Analyzing: return to == Stage::Writing;
        case Stage::Writing: return to == Stage::Critiquing;
        case Stage::Critiquing: return to == Stage::Reviewing;
        case Stage::Reviewing: return to == Stage::Revising || to == Stage::AwaitingPublicationGate;
        case Stage::Revising: return to == Stage::Analyzing || to == Stage::Writing;
        case Stage::AwaitingPublicationGate: return to == Stage::Completed || to == Stage::Rejected;
        default: return false;
    }
}

GateDecision GateDecision::select(std::string question_id, std::string by) {
    return {Gate::QuestionSelection, GateAction::Select, std::move(question_id), std::move(by), now_ms()};
}
GateDecision GateDecision::regenerate(std::string constraints, std::string by) {
    return {Gate::QuestionSelection, GateAction::Regenerate, std::move(constraints), std::move(by), now_ms()};
}
GateDecision GateDecision::approve(std::string by) {
    return {Gate::PublicationApproval, GateAction::Approve, {}, std::move(by), now_ms()};
}
GateDecision GateDecision::reject(std::string reason, std::string by) {
    return {Gate::PublicationApproval, GateAction::Reject, std::move(reason), std::move(by), now_ms()};
}

const LedgerEntry& CostLedger::add(std::string agent, std::int64_t input_tokens, std::int64_t output_tokens,
                                   std::int64_t input_price, std::int64_t output_price) {
    LedgerEntry entry{std::move(agent), input_tokens, output_tokens, input_price, output_price,
                      input_tokens * input_price + output_tokens * output_price};
    total += entry.cost;
    entries.push_back(std::move(entry));
    return entries.back();
}

std::int64_t CostLedger::recompute_total() const {
    std::int64_t sum = 0;
    for (const auto& e : entries) sum += e.cost;
    return sum;
}

const RunEvent& RunState::record(std::string actor, EventKind kind, nlohmann::json payload) {
    std::int64_t ts = now_ms();
    if (!events.empty()) ts = std::max(ts, events.back().timestamp_ms);
    events.push_back(RunEvent{ts, std::move(actor), kind, std::move(payload)});
    return events.back();
}

void RunState::enter(Stage next) {
    if (!is_legal_transition(stage, next))
        throw IntegrityError("stage transition",
                             std::string(to_string(stage)) + " -> " + std::string(to_string(next)));
    stage = next;
    record("orchestrator", EventKind::StageEntered, {{"stage", to_string(next)}});
}

const QuestionRound* RunState::current_round() const {
    return candidates.empty() ? nullptr : &candidates.back();
}

const ScreenedCandidate* RunState::find_candidate(std::string_view question_id) const {
    for (const auto& round : candidates)
        for (const auto& c : round.candidates)
            if (c.question.question_id == question_id) return &c;
    return nullptr;
}

const ScreenedCandidate* RunState::selected() const {
    return selected_question ? find_candidate(*selected_question) : nullptr;
}

Stage replay_stages(const std::vector<RunEvent>& events) {
    Stage stage = Stage::Created;
    for (const auto& e : events) {
        if (e.kind != EventKind::StageEntered) continue;
        const Stage next = stage_from_string(e.payload.at("stage").get<std::string>());
        if (!is_legal_transition(stage, next))
            throw IntegrityError("stage transition",
                                 std::string(to_string(stage)) + " -> " + std::string(to_string(next)));
        stage = next;
    }
    return stage;
}

void validate(const RunState& s) {
    if (s.run_id.empty()) throw IntegrityError("run id", "run_id is empty");
    if (s.question_round < 1) throw IntegrityError("question round", "question_round < 1");
    if (s.revision_iteration < 0) throw IntegrityError("revision iteration", "revision_iteration < 0");

    for (std::size_t i = 0; i < s.drafts.size(); ++i)
        if (s.drafts[i].version != static_cast<int>(i) + 1)
            throw IntegrityError("gapless versions", "draft at position " + std::to_string(i + 1) +
                                                         " has version " + std::to_string(s.drafts[i].version));
    if (s.reviews.size() > s.drafts.size())
        throw IntegrityError("review per draft", "more reviews than drafts");
    for (std::size_t i = 0; i < s.reviews.size(); ++i)
        if (s.reviews[i].draft_version != static_cast<int>(i) + 1)
            throw IntegrityError("review per draft", "review " + std::to_string(i + 1) + " refers to draft v" +
                                                         std::to_string(s.reviews[i].draft_version));
    for (const auto& r : s.reviews) {
        double sum = 0;
        for (double v : r.scores) sum += v;
        if (std::abs(sum / 5.0 - r.overall) > 1e-12)
            throw IntegrityError("overall is mean of scores", "review v" + std::to_string(r.draft_version));
    }

    for (std::size_t i = 0; i < s.candidates.size(); ++i)
        if (s.candidates[i].round != static_cast<int>(i) + 1)
            throw IntegrityError("question rounds", "round numbering is not 1..R");
    if (!s.candidates.empty() && static_cast<int>(s.candidates.size()) != s.question_round)
        throw IntegrityError("question rounds", "question_round does not match the stored rounds");
    std::set<std::string> ids;
    for (const auto& round : s.candidates)
        for (const auto& c : round.candidates)
            if (!ids.insert(c.question.question_id).second)
                throw IntegrityError("unique question ids", c.question.question_id);
    if (s.selected_question && !s.find_candidate(*s.selected_question))
        throw IntegrityError("selected question", "unknown id " + *s.selected_question);

    if (s.cost.recompute_total() != s.cost.total)
        throw IntegrityError("ledger total", "stored total differs from the sum of entries");
    for (const auto& e : s.cost.entries)
        if (e.cost != e.input_tokens * e.input_price + e.output_tokens * e.output_price)
            throw IntegrityError("ledger entry cost", e.agent);

    for (std::size_t i = 1; i < s.events.size(); ++i)
        if (s.events[i].timestamp_ms < s.events[i - 1].timestamp_ms)
            throw IntegrityError("monotone events", "event " + std::to_string(i) + " goes back in time");

    // Stage replay only applies once the run has started logging transitions.
    const bool any_transition = std::any_of(s.events.begin(), s.events.end(),
                                            [](const auto& e) { return e.kind == EventKind::StageEntered; });
    if (any_transition || s.stage != Stage::Created) {
        if (replay_stages(s.events) != s.stage)
            throw IntegrityError("stage replay", "events.log does not replay to " + std::string(to_string(s.stage)));
    }

    if (s.stage == Stage::Halted) {
        if (s.events.empty() || s.events.back().kind != EventKind::Halt)
            throw IntegrityError("terminal halt", "halted run does not end with a Halt event");
    }
}

}  // namespace econloop
