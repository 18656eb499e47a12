#include "econloop/orchestrator/pipeline.hpp"

#include <algorithm>
#include <ctime>
#include <iostream>
#include <random>

#include <fmt/format.h>

#include "econloop/core/run_store.hpp"
#include "econloop/data/audit.hpp"
#include "econloop/data/csv.hpp"
#include "econloop/dataprep/external.hpp"
#include "econloop/dataprep/sample.hpp"
#include "econloop/econometrics/errors.hpp"
#include "econloop/econometrics/estimators.hpp"
#include "econloop/econometrics/plan.hpp"
#include "econloop/manuscript/draft.hpp"
#include "econloop/profiler/profile.hpp"
#include "econloop/questions/generate.hpp"
#include "econloop/questions/screen.hpp"
#include "econloop/reviewer/review.hpp"

namespace econloop::orchestrator {

namespace {

const char* kOrchestrator = "Orchestrator";

std::string agent_for(llm::RoleTag role) {
    switch (role) {
    case llm::RoleTag::QuestionGen: return "QuestionAgent";
    case llm::RoleTag::DraftGen:
    case llm::RoleTag::Critique: return "PaperAgent";
    case llm::RoleTag::Review: return "ReviewerAgent";
    case llm::RoleTag::RevisionPlan: return "EconometricsAgent";
    }
    return "Unknown";
}

Stage awaiting(Gate gate) {
    return gate == Gate::QuestionSelection ? Stage::AwaitingQuestionGate : Stage::AwaitingPublicationGate;
}

bool belongs_to(GateAction action, Gate gate) {
    if (gate == Gate::QuestionSelection) return action == GateAction::Select || action == GateAction::Regenerate;
    return action == GateAction::Approve || action == GateAction::Reject;
}

const ScreenedCandidate* top_ranked(const QuestionRound& round) {
    for (const auto& c : round.candidates)
        if (c.report.feasible) return &c;
    return round.candidates.empty() ? nullptr : &round.candidates.front();
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Stage decide_gate(RunState& s, GateDecision d) {
    if (!belongs_to(d.action, d.gate))
        throw std::invalid_argument(std::string(to_string(d.action)) + " is not a decision for the " +
                                    std::string(to_string(d.gate)) + " gate");
    if (s.stage != awaiting(d.gate))
        throw GateStateError("run " + s.run_id + " is in stage " + std::string(to_string(s.stage)) +
                             ", not waiting at the " + std::string(to_string(d.gate)) + " gate");
    if (d.action == GateAction::Select) {
        const auto* round = s.current_round();
        const bool known = round && std::any_of(round->candidates.begin(), round->candidates.end(),
                                                [&](const auto& c) { return c.question.question_id == d.argument; });
        if (!known) throw UnknownCandidateError(d.argument);
    }
    if (d.action == GateAction::Reject && trim(d.argument).empty())
        throw std::invalid_argument("Reject needs a reason");
    if (d.decided_by.empty()) d.decided_by = "pi";
    if (d.decided_at_ms == 0) d.decided_at_ms = now_ms();

    s.decisions.push_back(d);
    s.record(d.decided_by, EventKind::GateDecided,
             {{"gate", to_string(d.gate)},
              {"action", to_string(d.action)},
              {"argument", d.argument},
              {"round", d.gate == Gate::QuestionSelection ? s.question_round : static_cast<int>(s.reviews.size())}});
    switch (d.action) {
    case GateAction::Select:
        s.selected_question = d.argument;
        s.enter(Stage::Collecting);
        break;
    case GateAction::Regenerate: s.enter(Stage::Questioning); break;
    case GateAction::Approve: s.enter(Stage::Completed); break;
    case GateAction::Reject:
        s.rejection_reason = d.argument;
        s.enter(Stage::Rejected);
        break;
    }
    return s.stage;
}

// --- resolvers -------------------------------------------------------------

void GateResolver::acknowledge(const RunState&, const std::exception_ptr& error) {
    if (error) std::rethrow_exception(error);
}

PolicyResolver::PolicyResolver(HeadlessPolicy policy, std::string select_id)
    : policy_(policy), select_id_(std::move(select_id)) {}

GateDecision PolicyResolver::resolve(const RunState& s, Gate gate) {
    if (gate == Gate::PublicationApproval) return GateDecision::approve("headless");
    const auto* round = s.current_round();
    if (!round || round->candidates.empty()) {
        // nothing to choose from; retry a couple of times before giving up
        if (s.question_round >= 3) throw questions::GenerationError("no candidates after " +
                                                                     std::to_string(s.question_round) + " rounds");
        return GateDecision::regenerate("", "headless");
    }
    if (policy_ == HeadlessPolicy::SelectById) return GateDecision::select(select_id_, "headless");
    return GateDecision::select(top_ranked(*round)->question.question_id, "headless");
}

QueuedResolver::QueuedResolver(std::deque<GateDecision> decisions) : decisions_(std::move(decisions)) {}

GateDecision QueuedResolver::resolve(const RunState& s, Gate gate) {
    if (!decisions_.empty() && decisions_.front().gate == gate) {
        auto d = decisions_.front();
        decisions_.pop_front();
        return d;
    }
    return fallback_.resolve(s, gate);
}

TerminalResolver::TerminalResolver(std::istream& in, std::ostream& out) : in_(in), out_(out) {}

GateDecision TerminalResolver::resolve(const RunState& s, Gate gate) {
    if (gate == Gate::QuestionSelection) {
        for (const auto& round : s.candidates) {
            out_ << "\nRound " << round.round << (round.constraints ? " (" + *round.constraints + ")" : "") << "\n";
            for (const auto& c : round.candidates) {
                const auto& r = c.report;
                out_ << fmt::format("  {:<5} {:<9} {:>5.2f}  {:<12} {}\n", c.question.question_id,
                                    r.feasible ? "feasible" : "FLAGGED", r.tractability_score,
                                    to_string(c.question.design), c.question.text);
                if (!r.missing_vars.empty()) {
                    out_ << "        missing:";
                    for (const auto& v : r.missing_vars) out_ << " " << v;
                    out_ << "\n";
                }
                if (!r.design_compatible) out_ << "        design: " << r.design_reason << "\n";
                if (!r.method_supported) out_ << "        method: " << r.method_reason << "\n";
            }
        }
        out_ << "\nselect <id> | regenerate <constraints>\n> " << std::flush;
    } else {
        out_ << "\nReview trajectory:";
        for (const auto& r : s.reviews) out_ << fmt::format(" v{}={:.2f}", r.draft_version, r.overall);
        if (!s.drafts.empty()) out_ << "\nLatest draft: drafts/draft_v" << s.drafts.back().version << ".md";
        out_ << "\napprove | reject <reason>\n> " << std::flush;
    }
    std::string line;
    while (std::getline(in_, line)) {
        line = trim(line);
        if (line.empty()) continue;
        const auto sp = line.find(' ');
        const auto cmd = line.substr(0, sp);
        const auto arg = sp == std::string::npos ? std::string() : trim(line.substr(sp + 1));
        if (cmd == "select") return GateDecision::select(arg);
        if (cmd == "regenerate") return GateDecision::regenerate(arg);
        if (cmd == "approve") return GateDecision::approve();
        if (cmd == "reject") return GateDecision::reject(arg);
        out_ << "unrecognized command '" << cmd << "'\n> " << std::flush;
    }
    throw RunCancelled();
}

void TerminalResolver::acknowledge(const RunState& s, const std::exception_ptr& error) {
    if (!error) {
        out_ << "-> " << to_string(s.stage) << "\n";
        return;
    }
    try {
        std::rethrow_exception(error);
    } catch (const std::exception& e) {
        out_ << "rejected: " << e.what() << "\n";
    }
}

std::future<Stage> ChannelResolver::submit(GateDecision decision) {
    std::lock_guard lock(mu_);
    Pending p{std::move(decision), {}};
    auto f = p.ack.get_future();
    if (closed_) {
        p.ack.set_exception(std::make_exception_ptr(RunCancelled()));
        return f;
    }
    queue_.push_back(std::move(p));
    cv_.notify_all();
    return f;
}

void ChannelResolver::close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    for (auto& p : queue_) p.ack.set_exception(std::make_exception_ptr(RunCancelled()));
    queue_.clear();
    cv_.notify_all();
}

GateDecision ChannelResolver::resolve(const RunState&, Gate) {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return closed_ || !queue_.empty(); });
    if (queue_.empty()) throw RunCancelled();
    auto p = std::move(queue_.front());
    queue_.pop_front();
    in_flight_ = std::move(p.ack);
    return p.decision;
}

void ChannelResolver::acknowledge(const RunState& s, const std::exception_ptr& error) {
    std::lock_guard lock(mu_);
    if (!in_flight_) return;
    if (error)
        in_flight_->set_exception(error);
    else
        in_flight_->set_value(s.stage);
    in_flight_.reset();
}

// --- executor --------------------------------------------------------------

std::string make_run_id() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
    std::random_device rd;
    return fmt::format("run-{}-{:04x}", buf, rd() & 0xffff);
}

std::optional<std::filesystem::path> default_meta_path(const std::filesystem::path& dataset) {
    auto p = dataset;
    p.replace_extension(".meta.json");
    if (std::filesystem::exists(p)) return p;
    return std::nullopt;
}

RunExecutor::RunExecutor(RunConfig config, llm::LlmBackend& backend, GateResolver& resolver)
    : config_(std::move(config)), raw_backend_(backend), resolver_(resolver) {
    backend_ = std::make_unique<llm::MeteredBackend>(
        raw_backend_, config_.prices,
        [this](const llm::LlmRequest& req, const llm::LlmResponse& resp, const llm::Price& price) {
            const auto agent = agent_for(req.role);
            const auto& entry = state_.cost.add(agent, resp.input_tokens, resp.output_tokens, price.input, price.output);
            state_.record(agent, EventKind::LlmCall,
                          {{"role", llm::to_string(req.role)},
                           {"backend", resp.backend_id},
                           {"input_tokens", resp.input_tokens},
                           {"output_tokens", resp.output_tokens},
                           {"cost", entry.cost}});
        });
}

const RunState& RunExecutor::initialize() {
    config_.validate();
    state_ = RunState{};
    state_.run_id = config_.run_id ? *config_.run_id : make_run_id();
    state_.created_at_ms = now_ms();
    state_.config = config_.to_json();
    state_.question_round = 1;
    persist();
    initialized_ = true;
    return state_;
}

void RunExecutor::persist() { persist_run(state_, config_.output_root); }

void RunExecutor::artifact(const std::string& actor, const std::string& name) {
    state_.record(actor, EventKind::ArtifactProduced, {{"artifact", name}});
}

void RunExecutor::audit_and_profile() {
    state_.enter(Stage::Auditing);
    if (config_.preloaded) {
        table_ = config_.preloaded;
    } else {
        table_ = std::make_shared<const data::Table>(data::load_csv(config_.dataset_path));
    }
    auto meta_path = config_.meta_path ? config_.meta_path : default_meta_path(config_.dataset_path);
    data::DatasetMeta meta;
    if (meta_path) meta = data::load_meta(*meta_path);
    if (meta.dataset_id.empty()) meta.dataset_id = config_.dataset_path.stem().string();
    auto audit = data::audit_dataset(*table_, meta.dataset_id, meta.panel, meta.labels);
    audit.source_path = config_.dataset_path.string();
    state_.audit = std::move(audit);
    artifact("DataAuditAgent", "audit");
    persist();

    state_.enter(Stage::Profiling);
    state_.profile = profiler::profile(*table_, *state_.audit);
    artifact("DataProfilingAgent", "profile.json");
    persist();

    for (const auto& path : config_.externals)
        externals_.push_back(dataprep::fetch_external(dataprep::LocalFile{path}));
}

GateDecision RunExecutor::await_gate(Gate gate) {
    nlohmann::json payload{{"gate", to_string(gate)},
                           {"round", gate == Gate::QuestionSelection ? state_.question_round
                                                                     : static_cast<int>(state_.reviews.size())}};
    if (gate == Gate::PublicationApproval && stop_reason_) payload["stop_reason"] = *stop_reason_;
    state_.record(kOrchestrator, EventKind::GateOpened, std::move(payload));
    persist();
    for (;;) {
        auto decision = resolver_.resolve(state_, gate);
        try {
            decide_gate(state_, decision);
        } catch (const GateStateError&) {
            resolver_.acknowledge(state_, std::current_exception());
            continue;
        } catch (const UnknownCandidateError&) {
            resolver_.acknowledge(state_, std::current_exception());
            continue;
        } catch (const std::invalid_argument&) {
            resolver_.acknowledge(state_, std::current_exception());
            continue;
        }
        persist();
        resolver_.acknowledge(state_, nullptr);
        return decision;
    }
}

void RunExecutor::question_loop() {
    std::string constraints;
    state_.enter(Stage::Questioning);
    for (;;) {
        std::size_t generated = 0;
        for (const auto& r : state_.candidates) generated += r.candidates.size();

        QuestionRound round;
        round.round = static_cast<int>(state_.candidates.size()) + 1;
        round.mode = config_.generation_mode;
        if (!constraints.empty()) round.constraints = constraints;

        questions::GenerationRequest req;
        req.audit = &*state_.audit;
        req.profile = &*state_.profile;
        req.dataset_name = state_.audit->dataset_id;
        req.domain = config_.domain;
        req.constraints = round.constraints;
        req.n = config_.n_questions;
        req.mode = config_.generation_mode;
        req.first_id = static_cast<int>(generated) + 1;
        try {
            auto outcome = questions::generate_questions(req, *backend_);
            for (const auto& w : outcome.warnings) state_.record("QuestionAgent", EventKind::Warning, {{"message", w}});
            std::vector<ScreenedCandidate> screened;
            for (auto& q : outcome.questions) {
                auto report = questions::screen(q, *state_.audit, *state_.profile);
                screened.push_back({std::move(q), std::move(report)});
            }
            round.candidates = questions::rank(std::move(screened));
        } catch (const questions::GenerationError& e) {
            state_.record("QuestionAgent", EventKind::Warning, {{"message", e.what()}, {"round", round.round}});
        }
        state_.candidates.push_back(std::move(round));
        state_.question_round = static_cast<int>(state_.candidates.size());
        artifact("QuestionScreeningAgent", fmt::format("questions/round_{}.json", state_.question_round));
        state_.enter(Stage::AwaitingQuestionGate);
        persist();

        const auto decision = await_gate(Gate::QuestionSelection);
        if (decision.action == GateAction::Select) return;
        const auto extra = trim(decision.argument);
        if (!extra.empty()) constraints += (constraints.empty() ? "" : "; ") + extra;
    }
}

void RunExecutor::ensure_analytic_table(const std::vector<Specification>& specs) {
    const auto& baseline = specs.front();
    std::vector<std::string> ids;
    for (const auto& v : {baseline.entity_var, baseline.time_var})
        if (v && std::find(ids.begin(), ids.end(), *v) == ids.end()) ids.push_back(*v);
    if (ids.empty() && state_.audit->panel_structure) {
        ids.push_back(state_.audit->panel_structure->entity_var);
        ids.push_back(state_.audit->panel_structure->time_var);
    }

    dataprep::SampleSpec spec;
    spec.id_vars = ids;
    for (const auto& s : specs)
        for (const auto& v : s.variables())
            if (std::find(ids.begin(), ids.end(), v) == ids.end() &&
                std::find(spec.variables.begin(), spec.variables.end(), v) == spec.variables.end())
                spec.variables.push_back(v);
    if (analytic_) {
        bool complete = true;
        for (const auto& v : spec.variables) complete &= analytic_->column_index(v).has_value();
        if (complete) return;
    }
    // listwise on the headline specification only; a missing event time marks
    // a never-treated unit
    spec.listwise_on = ids;
    for (const auto& v : baseline.variables()) {
        if (baseline.event_fields && v == baseline.event_fields->event_time_var) continue;
        if (std::find(spec.listwise_on.begin(), spec.listwise_on.end(), v) == spec.listwise_on.end())
            spec.listwise_on.push_back(v);
    }
    spec.restrictions = config_.restrictions;
    spec.transforms = config_.transforms;
    dataprep::validate_sample_spec(spec, *state_.audit, externals_);
    auto prepared = dataprep::build_analytic_table(*table_, spec, externals_);
    analytic_ = std::move(prepared.table);
    state_.sample_report = std::move(prepared.report);
}

void RunExecutor::collect() {
    const auto* chosen = state_.selected();
    auto baseline = econometrics::baseline_specification(chosen->question, *state_.audit);
    ensure_analytic_table({baseline});
    artifact("DataAgent", "analysis/sample_report.json");
    persist();
}

void RunExecutor::analyze() {
    state_.enter(Stage::Analyzing);
    const auto& question = state_.selected()->question;
    const AnalysisPlan* prior = state_.plan ? &*state_.plan : nullptr;
    auto plan = econometrics::plan(question, *state_.audit, pending_requests_, backend_.get(), prior);
    pending_requests_.clear();
    state_.plan = std::move(plan);
    ensure_analytic_table(state_.plan->specifications);

    std::vector<AnalysisResult> results;
    for (const auto& spec : state_.plan->specifications) {
        auto r = econometrics::estimate(*analytic_, spec);
        r.result_id = "r" + std::to_string(results.size() + 1);
        results.push_back(std::move(r));
    }
    state_.analyses = std::move(results);
    for (std::size_t k = 1; k <= state_.analyses.size(); ++k)
        artifact("EconometricsAgent", fmt::format("analysis/table_{}.csv", k));
    persist();
}

void RunExecutor::write_draft() {
    state_.enter(Stage::Writing);
    manuscript::DraftContext ctx;
    ctx.question = &state_.selected()->question;
    ctx.profile = &*state_.profile;
    ctx.sample = state_.sample_report ? &*state_.sample_report : nullptr;
    ctx.results = &state_.analyses;
    ctx.prior = state_.drafts.empty() ? nullptr : &state_.drafts.back();
    ctx.prior_review = state_.reviews.empty() ? nullptr : &state_.reviews.back();
    auto d = manuscript::draft(ctx, *backend_);
    for (const auto& w : d.warnings) state_.record("PaperAgent", EventKind::Warning, {{"message", w}});
    state_.drafts.push_back(std::move(d));
    artifact("PaperAgent", fmt::format("drafts/draft_v{}.md", state_.drafts.back().version));
    persist();
}

void RunExecutor::critique() {
    state_.enter(Stage::Critiquing);
    const auto current = state_.drafts.back();
    auto outcome = reviewer::self_critique(current, state_.analyses, *backend_);
    if (outcome.warning) state_.record("PaperAgent", EventKind::Warning, {{"message", *outcome.warning}});
    if (outcome.note) {
        state_.critiques.push_back(*outcome.note);
        if (outcome.note->severity == Severity::Major && !current.redrafted_after_critique) {
            manuscript::DraftContext ctx;
            ctx.question = &state_.selected()->question;
            ctx.profile = &*state_.profile;
            ctx.sample = state_.sample_report ? &*state_.sample_report : nullptr;
            ctx.results = &state_.analyses;
            const auto n = state_.drafts.size();
            ctx.prior = n >= 2 ? &state_.drafts[n - 2] : nullptr;
            ctx.prior_review = state_.reviews.empty() ? nullptr : &state_.reviews.back();
            auto d = manuscript::redraft_after_critique(ctx, current, *outcome.note, *backend_);
            for (const auto& w : d.warnings) state_.record("PaperAgent", EventKind::Warning, {{"message", w}});
            state_.drafts.back() = std::move(d);
            artifact("PaperAgent", fmt::format("drafts/draft_v{}.md", current.version));
        }
    }
    persist();
}

bool RunExecutor::review_and_decide() {
    state_.enter(Stage::Reviewing);
    reviewer::ReviewOptions options;
    options.accept_threshold = config_.accept_threshold;
    options.max_iterations = config_.max_revision_iterations;
    auto report = reviewer::review(state_.drafts.back(), state_.analyses, *backend_, options,
                                   static_cast<int>(state_.reviews.size()));
    state_.reviews.push_back(std::move(report));
    artifact("ReviewerAgent", fmt::format("reviews/review_v{}.json", state_.reviews.back().draft_version));

    const auto decision =
        reviewer::should_continue(state_.reviews, options.max_iterations, options.no_improvement_margin);
    if (decision.stop) {
        stop_reason_ = std::string(reviewer::to_string(*decision.reason));
        state_.enter(Stage::AwaitingPublicationGate);
        persist();
        return true;
    }
    persist();
    state_.enter(Stage::Revising);
    ++state_.revision_iteration;
    pending_requests_ = state_.reviews.back().revision_requests;
    persist();
    return false;
}

void RunExecutor::publication_gate() { await_gate(Gate::PublicationApproval); }

void RunExecutor::halt(const std::string& kind, const nlohmann::json& detail) {
    const auto at = state_.stage;
    if (is_terminal(at)) return;
    state_.enter(Stage::Halted);
    state_.record(kOrchestrator, EventKind::Halt, {{"stage", to_string(at)}, {"kind", kind}, {"error", detail}});
    persist();
}

RunState RunExecutor::run() {
    if (!initialized_) initialize();
    try {
        audit_and_profile();
        question_loop();
        collect();
        analyze();
        for (;;) {
            write_draft();
            critique();
            if (review_and_decide()) break;
            const bool robustness = std::any_of(pending_requests_.begin(), pending_requests_.end(), [](const auto& r) {
                return r.kind == RequestKind::RobustnessCheck;
            });
            if (robustness) analyze();
        }
        publication_gate();
    } catch (const econometrics::EstimationError& e) {
        state_.record("EconometricsAgent", EventKind::EstimationError, e.detail());
        halt(e.kind(), e.detail());
    } catch (const Error& e) {
        halt(e.kind(), {{"error", e.kind()}, {"message", e.what()}});
    } catch (const std::exception& e) {
        halt("InternalError", {{"error", "InternalError"}, {"message", e.what()}});
    }
    return state_;
}

RunState execute(const RunConfig& config, llm::LlmBackend& backend, GateResolver& resolver) {
    RunExecutor ex(config, backend, resolver);
    ex.initialize();
    return ex.run();
}

std::unique_ptr<GateResolver> default_resolver(const RunConfig& config) {
    if (config.mode == RunMode::Interactive) return std::make_unique<TerminalResolver>(std::cin, std::cout);
    return std::make_unique<PolicyResolver>(config.policy, config.select_id);
}

}  // namespace econloop::orchestrator
