#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <unistd.h>

#include <gtest/gtest.h>

#include "datasets.hpp"
#include "econloop/core/error.hpp"
#include "econloop/core/run_store.hpp"
#include "econloop/llm/scripted.hpp"
#include "econloop/orchestrator/ablation.hpp"
#include "econloop/orchestrator/pipeline.hpp"
#include "property.hpp"
#include "scripts.hpp"

using namespace econloop;
using namespace econloop::orchestrator;
using econloop::testing::for_all;
using econloop::testing::Rng;
namespace fs = std::filesystem;
namespace et = econloop::testing;

namespace {

fs::path base() { return fs::temp_directory_path() / ("econloop_orch_" + std::to_string(::getpid())); }

fs::path scratch(const std::string& name) {
    const auto dir = base() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const fs::path& panel_csv() {
    static const fs::path p = et::write_labor_panel(scratch("data"));
    return p;
}

RunConfig config_for(const fs::path& out, const std::string& run_id = "run-test") {
    RunConfig c;
    c.dataset_path = panel_csv();
    c.backend = BackendChoice::parse("scripted:fixture.json");
    c.prices = et::fixture_prices();
    c.output_root = out;
    c.run_id = run_id;
    return c;
}

RunState run_with(const llm::ScriptFixture& f, const fs::path& out, GateResolver& resolver,
                  const std::string& run_id = "run-test") {
    llm::ScriptedBackend b(f);
    return execute(config_for(out, run_id), b, resolver);
}

RunState run_headless(const llm::ScriptFixture& f, const fs::path& out, const std::string& run_id = "run-test") {
    PolicyResolver p(HeadlessPolicy::SelectTopRanked);
    return run_with(f, out, p, run_id);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<const RunEvent*> events_of(const RunState& s, EventKind k) {
    std::vector<const RunEvent*> out;
    for (const auto& e : s.events)
        if (e.kind == k) out.push_back(&e);
    return out;
}

std::int64_t cost_of(llm::RoleTag role) {
    const auto u = et::usage_for(role);
    const auto p = et::fixture_prices().lookup("scripted");
    return u.input * p.input + u.output * p.output;
}

RunState waiting_state() {
    RunState s;
    s.run_id = "gate";
    for (auto st : {Stage::Auditing, Stage::Profiling, Stage::Questioning, Stage::AwaitingQuestionGate}) s.enter(st);
    QuestionRound r;
    r.candidates.push_back({});
    r.candidates[0].question.question_id = "q1";
    s.candidates.push_back(r);
    return s;
}

}  // namespace

TEST(Pipeline, HappyPathCompletesAtThirdDraft) {
    const auto out = scratch("happy");
    const auto s = run_headless(et::happy_path_fixture(), out);
    ASSERT_EQ(s.stage, Stage::Completed) << s.events.back().payload.dump();
    EXPECT_EQ(s.selected_question, std::optional<std::string>("q1"));
    ASSERT_EQ(s.drafts.size(), 3u);
    ASSERT_EQ(s.reviews.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(s.reviews[i].overall, et::HappyPath::overalls[i], 1e-12);
        EXPECT_EQ(s.drafts[i].version, static_cast<int>(i) + 1);
    }
    EXPECT_EQ(s.drafts[0].word_count, et::HappyPath::words_v1);
    EXPECT_EQ(s.drafts[1].word_count, et::HappyPath::words_v2);
    EXPECT_TRUE(s.drafts[1].redrafted_after_critique);
    EXPECT_EQ(s.drafts[2].word_count, et::HappyPath::words_final);
    EXPECT_EQ(s.reviews[2].verdict, Verdict::Accept);
    EXPECT_FALSE(s.reviews[2].budget_exhausted);
    // the robustness request added an event study
    ASSERT_TRUE(s.plan);
    ASSERT_EQ(s.plan->specifications.size(), 2u);
    EXPECT_EQ(s.plan->specifications[1].design, Design::EventStudy);
    EXPECT_EQ(s.analyses.size(), 2u);

    EXPECT_EQ(replay_stages(s.events), Stage::Completed);
    EXPECT_NO_THROW(validate(s));
    const auto dir = out / "run-test";
    for (const char* f : {"state.json", "events.log", "profile.json", "questions/round_1.json", "drafts/draft_v1.md",
                          "drafts/draft_v3.md", "reviews/review_v3.json", "analysis/table_1.csv",
                          "analysis/table_2.csv", "analysis/figure_1.csv", "analysis/sample_report.json"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    EXPECT_EQ(load_run(dir), s);

    const auto opened = events_of(s, EventKind::GateOpened);
    ASSERT_EQ(opened.size(), 2u);
    EXPECT_EQ(opened[1]->payload["stop_reason"], "Accepted");
}

TEST(Pipeline, Deterministic) {
    const auto a = run_headless(et::happy_path_fixture(), scratch("det_a"));
    const auto b = run_headless(et::happy_path_fixture(), scratch("det_b"));
    EXPECT_EQ(a.drafts, b.drafts);
    EXPECT_EQ(a.reviews, b.reviews);
    EXPECT_EQ(a.analyses, b.analyses);
    EXPECT_EQ(a.cost, b.cost);
    EXPECT_EQ(a.candidates, b.candidates);
    for (const char* f : {"drafts/draft_v1.md", "drafts/draft_v2.md", "drafts/draft_v3.md", "reviews/review_v1.json",
                          "reviews/review_v3.json", "analysis/table_1.csv", "analysis/figure_1.csv",
                          "questions/round_1.json"})
        EXPECT_EQ(slurp(base() / "det_a/run-test" / f), slurp(base() / "det_b/run-test" / f))
            << f;
}

TEST(Pipeline, LedgerMatchesCalls) {
    const auto s = run_headless(et::happy_path_fixture(), scratch("ledger"));
    using llm::RoleTag;
    const std::map<RoleTag, int> calls{{RoleTag::QuestionGen, 1},
                                       {RoleTag::DraftGen, 4},
                                       {RoleTag::Critique, 3},
                                       {RoleTag::Review, 3},
                                       {RoleTag::RevisionPlan, 1}};
    std::int64_t expected = 0;
    for (const auto& [role, n] : calls) expected += n * cost_of(role);
    EXPECT_EQ(expected, 979800);
    EXPECT_EQ(s.cost.total, expected);
    EXPECT_EQ(s.cost.recompute_total(), expected);

    std::int64_t from_events = 0;
    const auto llm_events = events_of(s, EventKind::LlmCall);
    for (const auto* e : llm_events) from_events += e->payload["cost"].get<std::int64_t>();
    EXPECT_EQ(from_events, s.cost.total);
    EXPECT_EQ(llm_events.size(), s.cost.entries.size());
    EXPECT_EQ(llm_events.size(), 12u);
}

TEST(Pipeline, TimeInvariantRegressorHalts) {
    const auto out = scratch("halt");
    const auto s = run_headless(et::halting_fixture(), out);
    ASSERT_EQ(s.stage, Stage::Halted);
    EXPECT_TRUE(s.drafts.empty());
    EXPECT_TRUE(s.reviews.empty());
    const auto err = events_of(s, EventKind::EstimationError);
    ASSERT_EQ(err.size(), 1u);
    EXPECT_EQ(err[0]->payload["kind"], "NoWithinVariation");
    EXPECT_EQ(err[0]->payload["offending"], nlohmann::json::array({"birth_year"}));
    const auto halts = events_of(s, EventKind::Halt);
    ASSERT_EQ(halts.size(), 1u);
    EXPECT_EQ(halts[0]->payload["stage"], "Analyzing");
    EXPECT_EQ(s.events.back().kind, EventKind::Halt);
    EXPECT_EQ(replay_stages(s.events), Stage::Halted);

    const auto dir = out / "run-test";
    EXPECT_TRUE(fs::exists(dir / "state.json"));
    EXPECT_TRUE(fs::exists(dir / "events.log"));
    EXPECT_TRUE(fs::exists(dir / "profile.json"));
    EXPECT_TRUE(fs::exists(dir / "questions/round_1.json"));
    EXPECT_FALSE(fs::exists(dir / "drafts"));
    EXPECT_EQ(load_run(dir), s);
}

TEST(Pipeline, RegenerateKeepsEveryRound) {
    const auto out = scratch("regen");
    QueuedResolver r({GateDecision::regenerate("focus on education")});
    const auto s = run_with(et::regenerate_fixture(), out, r);
    ASSERT_EQ(s.stage, Stage::Completed);
    ASSERT_EQ(s.candidates.size(), 2u);
    EXPECT_EQ(s.candidates[0].candidates.size(), 8u);
    EXPECT_EQ(s.candidates[1].candidates.size(), 4u);
    EXPECT_EQ(s.candidates[1].constraints, std::optional<std::string>("focus on education"));
    EXPECT_EQ(s.question_round, 2);
    ASSERT_TRUE(s.selected_question);
    EXPECT_NE(s.find_candidate(*s.selected_question), nullptr);
    EXPECT_EQ(s.drafts.size(), 1u);

    const auto dir = out / "run-test/questions";
    const auto r1 = nlohmann::json::parse(slurp(dir / "round_1.json"));
    const auto r2 = nlohmann::json::parse(slurp(dir / "round_2.json"));
    EXPECT_EQ(r1["candidates"].size(), 8u);
    std::vector<std::string> ids;
    for (const auto& c : r2["candidates"]) ids.push_back(c["question"]["question_id"]);
    std::sort(ids.begin(), ids.end());
    EXPECT_EQ(ids, (std::vector<std::string>{"q10", "q11", "q12", "q9"}));
}

TEST(Pipeline, RejectAtPublicationGate) {
    QueuedResolver r({GateDecision::select("q1"), GateDecision::reject("not convinced")});
    const auto s = run_with(et::happy_path_fixture(), scratch("reject"), r);
    EXPECT_EQ(s.stage, Stage::Rejected);
    EXPECT_EQ(s.rejection_reason, std::optional<std::string>("not convinced"));
    EXPECT_NO_THROW(validate(s));
}

TEST(Pipeline, PolicyEquivalentToExplicitSelection) {
    const auto policy = run_headless(et::happy_path_fixture(), scratch("policy"));
    QueuedResolver q({GateDecision::select("q1"), GateDecision::approve()});
    const auto queued = run_with(et::happy_path_fixture(), scratch("queued"), q);
    EXPECT_EQ(policy.selected_question, queued.selected_question);
    EXPECT_EQ(policy.drafts, queued.drafts);
    EXPECT_EQ(policy.reviews, queued.reviews);
    EXPECT_EQ(policy.cost, queued.cost);
    EXPECT_EQ(policy.stage, queued.stage);
    ASSERT_EQ(policy.decisions.size(), queued.decisions.size());
    for (std::size_t i = 0; i < policy.decisions.size(); ++i)
        EXPECT_TRUE(policy.decisions[i].same_choice(queued.decisions[i]));
}

TEST(PipelineProperty, RandomScriptsKeepInvariants) {
    for_all(151, 25, [](Rng& rng, int i) {
        const auto fixture = et::random_script(rng);
        const auto out = scratch("model_" + std::to_string(i));
        auto cfg = config_for(out);
        cfg.accept_threshold = static_cast<double>(rng.integer(40, 80)) / 10.0;
        cfg.max_revision_iterations = static_cast<int>(rng.integer(1, 4));
        llm::ScriptedBackend b(fixture);
        PolicyResolver p(HeadlessPolicy::SelectTopRanked);
        const auto s = execute(cfg, b, p);

        EXPECT_TRUE(s.stage == Stage::Completed || s.stage == Stage::Halted) << to_string(s.stage);
        EXPECT_EQ(replay_stages(s.events), s.stage);
        EXPECT_NO_THROW(validate(s));
        EXPECT_LE(static_cast<int>(s.reviews.size()), cfg.max_revision_iterations);
        EXPECT_LE(s.reviews.size(), s.drafts.size());
        for (std::size_t v = 0; v < s.drafts.size(); ++v) EXPECT_EQ(s.drafts[v].version, static_cast<int>(v) + 1);

        std::int64_t sum = 0;
        for (const auto* e : events_of(s, EventKind::LlmCall)) sum += e->payload["cost"].get<std::int64_t>();
        EXPECT_EQ(sum, s.cost.total);
        EXPECT_EQ(s.cost.total, s.cost.recompute_total());

        if (s.stage == Stage::Halted) {
            EXPECT_EQ(s.events.back().kind, EventKind::Halt);
            if (!events_of(s, EventKind::EstimationError).empty()) {
                EXPECT_TRUE(s.drafts.empty());
            }
        } else {
            EXPECT_EQ(s.reviews.size(), s.drafts.size());
            // Completion without an Accept verdict only happens when scores stalled.
            const auto opened = events_of(s, EventKind::GateOpened);
            ASSERT_FALSE(opened.empty());
            const auto reason = opened.back()->payload.value("stop_reason", std::string());
            if (s.reviews.back().verdict == Verdict::Accept) {
                EXPECT_TRUE(reason == "Accepted" || reason == "BudgetExhausted") << reason;
            } else {
                EXPECT_EQ(reason, "NoImprovement");
            }
        }
        EXPECT_EQ(load_run(out / "run-test"), s);
    });
}

TEST(Gate, DecideGateChecks) {
    auto s = waiting_state();
    EXPECT_THROW(decide_gate(s, GateDecision::approve()), GateStateError);
    auto mismatched = GateDecision::approve();
    mismatched.gate = Gate::QuestionSelection;
    EXPECT_THROW(decide_gate(s, mismatched), std::invalid_argument);
    EXPECT_THROW(decide_gate(s, GateDecision::select("q7")), UnknownCandidateError);
    EXPECT_EQ(s.stage, Stage::AwaitingQuestionGate);
    EXPECT_TRUE(s.decisions.empty());
    EXPECT_EQ(decide_gate(s, GateDecision::select("q1")), Stage::Collecting);
    EXPECT_EQ(s.selected_question, std::optional<std::string>("q1"));
    EXPECT_THROW(decide_gate(s, GateDecision::select("q1")), GateStateError);

    auto r = waiting_state();
    EXPECT_EQ(decide_gate(r, GateDecision::regenerate("more")), Stage::Questioning);
    EXPECT_EQ(events_of(r, EventKind::GateDecided).size(), 1u);

    RunState p;
    for (auto st : {Stage::Auditing, Stage::Profiling, Stage::Questioning, Stage::AwaitingQuestionGate,
                    Stage::Collecting, Stage::Analyzing, Stage::Writing, Stage::Critiquing, Stage::Reviewing,
                    Stage::AwaitingPublicationGate})
        p.enter(st);
    EXPECT_THROW(decide_gate(p, GateDecision::reject("  ")), std::invalid_argument);
    EXPECT_EQ(decide_gate(p, GateDecision::reject("weak")), Stage::Rejected);
}

TEST(Gate, ChannelResolverAcrossThreads) {
    const auto out = scratch("channel");
    ChannelResolver ch;
    llm::ScriptedBackend b(et::happy_path_fixture());
    RunExecutor ex(config_for(out), b, ch);
    ex.initialize();
    RunState final;
    std::thread worker([&] { final = ex.run(); });

    auto bad = ch.submit(GateDecision::select("q99"));
    EXPECT_THROW(bad.get(), UnknownCandidateError);
    EXPECT_EQ(ch.submit(GateDecision::select("q1")).get(), Stage::Collecting);
    EXPECT_EQ(ch.submit(GateDecision::approve()).get(), Stage::Completed);
    worker.join();
    EXPECT_EQ(final.stage, Stage::Completed);
    EXPECT_EQ(final.selected_question, std::optional<std::string>("q1"));
}

TEST(Gate, ClosedChannelHaltsRun) {
    const auto out = scratch("closed");
    ChannelResolver ch;
    llm::ScriptedBackend b(et::happy_path_fixture());
    RunExecutor ex(config_for(out), b, ch);
    ex.initialize();
    std::thread worker([&] { ex.run(); });
    ch.close();
    worker.join();
    EXPECT_EQ(ex.state().stage, Stage::Halted);
    EXPECT_EQ(ex.state().events.back().payload["kind"], "Cancelled");
    EXPECT_THROW(ch.submit(GateDecision::approve()).get(), RunCancelled);
}

TEST(Gate, TerminalResolverReadsCommands) {
    std::istringstream in("bogus\nselect q3\napprove\n");
    std::ostringstream os;
    TerminalResolver t(in, os);
    const auto s = run_with(et::happy_path_fixture(), scratch("terminal"), t);
    EXPECT_EQ(s.selected_question, std::optional<std::string>("q3"));
    EXPECT_NE(os.str().find("unrecognized command 'bogus'"), std::string::npos);
    EXPECT_NE(os.str().find("FLAGGED"), std::string::npos);
}

TEST(Ablation, ArmsReproduceFeasibilityShares) {
    llm::ScriptedBackend aware(et::ablation_fixture(et::kAwareArm, et::kAblationPerRound, et::kAwareSeed));
    llm::ScriptedBackend loose(et::ablation_fixture(et::kUnconstrainedArm, et::kAblationPerRound, et::kUnconstrainedSeed));
    AblationConfig cfg;
    cfg.audit = &et::labor_audit();
    cfg.profile = &et::labor_profile();
    cfg.n_per_round = et::kAblationPerRound;
    cfg.rounds = std::max(et::ablation_rounds(et::kAwareArm, et::kAblationPerRound),
                          et::ablation_rounds(et::kUnconstrainedArm, et::kAblationPerRound));
    cfg.arms = {{"dataset-aware", GenerationMode::DatasetAware, &aware},
                {"unconstrained", GenerationMode::Unconstrained, &loose}};
    const auto report = run_ablation(cfg);
    ASSERT_EQ(report.rows.size(), 2u);
    const auto& a = report.rows[0].stats;
    const auto& u = report.rows[1].stats;
    EXPECT_EQ(a.n_questions, 79u);
    EXPECT_EQ(a.n_feasible, 69u);
    EXPECT_EQ(a.percent, 87);
    EXPECT_EQ(a.missing_variables, 6u);
    EXPECT_EQ(a.incompatible_design, 3u);
    EXPECT_EQ(a.unsupported_method, 1u);
    EXPECT_EQ(u.n_questions, 82u);
    EXPECT_EQ(u.n_feasible, 34u);
    EXPECT_EQ(u.percent, 41);
    EXPECT_EQ(u.missing_variables, 30u);
    EXPECT_EQ(u.incompatible_design, 12u);
    EXPECT_EQ(u.unsupported_method, 6u);
    EXPECT_FALSE(report.rows[0].error);
    EXPECT_FALSE(report.rows[1].error);

    const auto dir = scratch("ablation");
    write_ablation(report, dir);
    EXPECT_TRUE(fs::exists(dir / "ablation.json"));
    EXPECT_NE(slurp(dir / "ablation.txt").find("87"), std::string::npos);
}

TEST(Config, JsonRoundTripAndValidation) {
    auto c = config_for("/tmp/out", "run-x");
    c.restrictions = {{"age", dataprep::Comparator::Ge, "25"}};
    c.transforms = {{"wage", TransformKind::LogTransform, 0}};
    c.externals = {"/tmp/gdp.csv"};
    c.policy = HeadlessPolicy::SelectById;
    c.select_id = "q2";
    const auto back = RunConfig::from_json(c.to_json());
    EXPECT_EQ(back.to_json(), c.to_json());

    auto bad = c.to_json();
    bad["accept_threshold"] = 11;
    EXPECT_THROW(RunConfig::from_json(bad), std::invalid_argument);
    bad = c.to_json();
    bad["llm"] = "magic";
    EXPECT_THROW(RunConfig::from_json(bad), std::invalid_argument);
    bad = c.to_json();
    bad.erase("select_id");
    EXPECT_THROW(RunConfig::from_json(bad), std::invalid_argument);
    EXPECT_THROW(RunConfig::from_json(nlohmann::json::array()), std::invalid_argument);
    EXPECT_EQ(BackendChoice::parse("scripted:/a/b.json").fixture, fs::path("/a/b.json"));
    EXPECT_EQ(BackendChoice::parse("live").describe(), "live");
}
