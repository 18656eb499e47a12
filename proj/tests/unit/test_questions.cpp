#include <algorithm>
#include <regex>

#include <gtest/gtest.h>

#include "datasets.hpp"
#include "econloop/data/audit.hpp"
#include "econloop/llm/scripted.hpp"
#include "econloop/profiler/profile.hpp"
#include "econloop/questions/generate.hpp"
#include "econloop/questions/screen.hpp"
#include "property.hpp"
#include "scripts.hpp"

using namespace econloop;
using namespace econloop::questions;
using econloop::testing::for_all;
using econloop::testing::Rng;
using nlohmann::json;

namespace {

GenerationRequest labor_request(GenerationMode mode = GenerationMode::DatasetAware) {
    GenerationRequest r;
    r.audit = &econloop::testing::labor_audit();
    r.profile = &econloop::testing::labor_profile();
    r.dataset_name = "labor_panel";
    r.domain = "labor economics";
    r.n = 8;
    r.mode = mode;
    return r;
}

bool contains_word(const std::string& text, const std::string& word) {
    const std::regex re("(^|[^A-Za-z0-9_])" + word + "($|[^A-Za-z0-9_])");
    return std::regex_search(text, re);
}

ResearchQuestion question(std::string id, std::vector<std::string> vars, Design design = Design::OLS) {
    ResearchQuestion q;
    q.question_id = std::move(id);
    q.outcome_var = vars.front();
    q.treatment_vars.assign(vars.begin() + 1, vars.end());
    q.design = design;
    q.design_label = std::string(to_string(design));
    return q;
}

}  // namespace

TEST(Prompt, DatasetAwareListsVariablesAndPanel) {
    const auto req = build_question_prompt(labor_request());
    EXPECT_EQ(req.role, llm::RoleTag::QuestionGen);
    for (const auto& v : econloop::testing::labor_audit().variables) EXPECT_TRUE(contains_word(req.user_text, v.name)) << v.name;
    EXPECT_NE(req.user_text.find("Panel structure: entity id (60 entities), time year"), std::string::npos);
    EXPECT_NE(req.user_text.find("health_score"), std::string::npos);
}

TEST(Prompt, UnconstrainedOmitsEveryAuditVariable) {
    const auto req = build_question_prompt(labor_request(GenerationMode::Unconstrained));
    for (const auto& v : econloop::testing::labor_audit().variables)
        EXPECT_FALSE(contains_word(req.user_text, v.name)) << v.name;
}

TEST(PromptProperty, UnconstrainedPromptNeverNamesAuditVariables) {
    for_all(61, 50, [](Rng& rng, int) {
        DatasetAudit audit;
        audit.dataset_id = "ds";
        const int n = static_cast<int>(rng.integer(1, 30));
        for (int i = 0; i < n; ++i) {
            std::string name = "v";
            const int len = static_cast<int>(rng.integer(3, 10));
            for (int k = 0; k < len; ++k) name += static_cast<char>('a' + rng.integer(0, 25));
            audit.variables.push_back({name, ValueKind::Numeric, std::nullopt, 10});
        }
        audit.n_cols = audit.variables.size();
        DataProfile profile;
        GenerationRequest r;
        r.audit = &audit;
        r.profile = &profile;
        r.dataset_name = "survey";
        r.domain = "development";
        r.mode = GenerationMode::Unconstrained;
        if (rng.bernoulli(0.5)) r.constraints = "focus on households";
        const auto text = build_question_prompt(r).user_text + build_question_prompt(r).system_text;
        for (const auto& v : audit.variables) EXPECT_EQ(text.find(v.name), std::string::npos) << v.name;
    });
}

TEST(Prompt, ConstraintsAppended) {
    auto r = labor_request();
    r.constraints = "focus on education";
    EXPECT_NE(build_question_prompt(r).user_text.find("focus on education"), std::string::npos);
}

TEST(Generate, AssignsSequentialIdsAndDropsMalformed) {
    json items = json::array();
    items.push_back(econloop::testing::question_json("a", "wage", {"training"}, {}, "OLS"));
    items.push_back({{"text", "no outcome"}, {"design", "OLS"}, {"treatment_vars", {"x"}}});
    items.push_back(econloop::testing::question_json("b", "hours", {"married"}, {}, "FixedEffects"));
    items.push_back(econloop::testing::question_json("c", "hours", {"married"}, {}, "IV"));
    llm::ScriptFixture f;
    f.add(llm::RoleTag::QuestionGen, json{{"questions", items}}.dump());
    llm::ScriptedBackend b(f);
    auto req = labor_request();
    req.first_id = 9;
    const auto out = generate_questions(req, b);
    ASSERT_EQ(out.questions.size(), 3u);
    EXPECT_EQ(out.questions[0].question_id, "q9");
    EXPECT_EQ(out.questions[1].question_id, "q10");
    EXPECT_EQ(out.questions[2].design, Design::Unsupported);
    EXPECT_EQ(out.questions[2].design_label, "IV");
    ASSERT_EQ(out.warnings.size(), 1u);
    EXPECT_NE(out.warnings[0].find("outcome_var"), std::string::npos);
}

TEST(Generate, RespectsRequestedCount) {
    llm::ScriptFixture f;
    f.add(llm::RoleTag::QuestionGen, json{{"questions", econloop::testing::happy_questions()}}.dump());
    llm::ScriptedBackend b(f);
    auto req = labor_request();
    req.n = 3;
    EXPECT_EQ(generate_questions(req, b).questions.size(), 3u);
}

TEST(Generate, NothingParseableIsAGenerationError) {
    llm::ScriptFixture f;
    f.add(llm::RoleTag::QuestionGen, "I cannot think of anything.");
    f.add(llm::RoleTag::QuestionGen, R"({"questions": [{"text": "x"}]})");
    llm::ScriptedBackend b(f);
    EXPECT_THROW(generate_questions(labor_request(), b), GenerationError);
    EXPECT_THROW(generate_questions(labor_request(), b), GenerationError);
}

TEST(Screen, LabeledCorpusMatchesAllLabels) {
    const auto corpus = econloop::testing::screener_corpus();
    ASSERT_EQ(corpus.size(), 30u);
    int correct = 0;
    for (const auto& item : corpus) {
        const auto r = screen(item.question, econloop::testing::labor_audit(), econloop::testing::labor_profile());
        const bool ok = r.feasible == !item.expected.has_value() && r.first_failure() == item.expected;
        EXPECT_TRUE(ok) << item.question.question_id << ": " << r.design_reason;
        correct += ok;
    }
    EXPECT_EQ(correct, 30);
}

TEST(Screen, TractabilityFromMissingness) {
    const auto& audit = econloop::testing::labor_audit();
    const auto& prof = econloop::testing::labor_profile();
    const auto r = screen(question("q1", {"wage", "health_score"}), audit, prof);
    EXPECT_TRUE(r.feasible);
    EXPECT_DOUBLE_EQ(r.tractability_score, 1.0 - prof.find("health_score")->missing_rate);
    const auto missing = screen(question("q2", {"wage", "nope"}), audit, prof);
    EXPECT_EQ(missing.tractability_score, 0.0);
    EXPECT_EQ(missing.missing_vars, std::vector<std::string>{"nope"});
}

TEST(Screen, CrossSectionRejectsPanelDesigns) {
    const auto t = econloop::testing::numeric_table({{"y", {1, 2, 3, 4}}, {"d", {0, 1, 0, 1}, ValueKind::Binary}});
    const auto audit = data::audit_dataset(t, "xs");
    const auto prof = profiler::profile(t, audit);
    EXPECT_EQ(screen(question("q1", {"y", "d"}, Design::FixedEffects), audit, prof).first_failure(),
              FailureCause::IncompatibleDesign);
    EXPECT_EQ(screen(question("q2", {"y", "d"}, Design::EventStudy), audit, prof).first_failure(),
              FailureCause::IncompatibleDesign);
    EXPECT_TRUE(screen(question("q3", {"y", "d"}), audit, prof).feasible);
    EXPECT_EQ(screen(question("q4", {"y", "d"}, Design::Unsupported), audit, prof).first_failure(),
              FailureCause::UnsupportedMethod);
}

TEST(ScreenProperty, PureAndConsistent) {
    const auto& audit = econloop::testing::labor_audit();
    const auto& prof = econloop::testing::labor_profile();
    std::vector<std::string> names;
    for (const auto& v : audit.variables) names.push_back(v.name);
    names.insert(names.end(), {"ghost", "parental_income", "firm_size"});
    const std::vector<Design> designs{Design::OLS, Design::FixedEffects, Design::DiD, Design::EventStudy,
                                      Design::Unsupported};
    for_all(62, 300, [&](Rng& rng, int i) {
        std::vector<std::string> vars;
        const int n = static_cast<int>(rng.integer(1, 4));
        for (int k = 0; k < n; ++k) vars.push_back(rng.pick(names));
        auto q = question("q" + std::to_string(i), vars, rng.pick(designs));
        if (rng.bernoulli(0.3)) q.control_vars.push_back(rng.pick(names));
        const auto a = screen(q, audit, prof);
        EXPECT_EQ(screen(q, audit, prof), a);
        EXPECT_EQ(a.feasible, a.vars_exist && a.design_compatible && a.method_supported);
        EXPECT_EQ(a.missing_vars.empty(), a.vars_exist);
        if (a.feasible) { EXPECT_TRUE(a.missing_vars.empty()); }
        EXPECT_GE(a.tractability_score, 0.0);
        EXPECT_LE(a.tractability_score, 1.0);
        EXPECT_EQ(a.first_failure().has_value(), !a.feasible);
    });
}

TEST(Rank, FeasibleByScoreThenNaturalId) {
    auto make = [](std::string id, bool feasible, double score) {
        ScreenedCandidate c;
        c.question.question_id = id;
        c.report.question_id = id;
        c.report.feasible = feasible;
        c.report.tractability_score = score;
        return c;
    };
    const auto ranked = rank({make("q10", true, 1.0), make("q3", false, 1.0), make("q2", true, 1.0),
                              make("q4", true, 0.7), make("q1", false, 0.0)});
    std::vector<std::string> ids;
    for (const auto& c : ranked) ids.push_back(c.question.question_id);
    EXPECT_EQ(ids, (std::vector<std::string>{"q2", "q10", "q4", "q3", "q1"}));
    EXPECT_TRUE(natural_less("q2", "q10"));
    EXPECT_FALSE(natural_less("q10", "q2"));
    EXPECT_TRUE(natural_less("a", "b"));
}

TEST(RankProperty, MembershipUnchanged) {
    for_all(63, 200, [](Rng& rng, int) {
        std::vector<ScreenedCandidate> in;
        const int n = static_cast<int>(rng.integer(0, 15));
        for (int i = 0; i < n; ++i) {
            ScreenedCandidate c;
            c.question.question_id = "q" + std::to_string(rng.integer(1, 30));
            c.report.feasible = rng.bernoulli(0.6);
            c.report.tractability_score = static_cast<double>(rng.integer(0, 4)) / 4.0;
            in.push_back(c);
        }
        auto out = rank(in);
        ASSERT_EQ(out.size(), in.size());
        auto key = [](const ScreenedCandidate& c) {
            return std::make_tuple(c.question.question_id, c.report.feasible, c.report.tractability_score);
        };
        std::vector<std::tuple<std::string, bool, double>> a, b;
        for (const auto& c : in) a.push_back(key(c));
        for (const auto& c : out) b.push_back(key(c));
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        EXPECT_EQ(a, b);
        // feasible prefix, sorted by score
        bool seen_infeasible = false;
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (!out[i].report.feasible) {
                seen_infeasible = true;
            } else {
                EXPECT_FALSE(seen_infeasible);
            }
            if (i > 0 && out[i].report.feasible && out[i - 1].report.feasible) {
                EXPECT_GE(out[i - 1].report.tractability_score, out[i].report.tractability_score);
            }
        }
    });
}

TEST(Stats, IntegerPercentRounding) {
    auto rounds_with = [](std::size_t total, std::size_t feasible) {
        QuestionRound r;
        for (std::size_t i = 0; i < total; ++i) {
            ScreenedCandidate c;
            c.report.feasible = i < feasible;
            c.report.vars_exist = c.report.feasible || i % 2 == 0;
            c.report.design_compatible = c.report.feasible;
            c.report.method_supported = true;
            r.candidates.push_back(c);
        }
        return std::vector<QuestionRound>{r};
    };
    const auto a = feasibility_stats(rounds_with(79, 69));
    EXPECT_EQ(a.percent, 87);
    const auto b = feasibility_stats(rounds_with(82, 34));
    EXPECT_EQ(b.percent, 41);
    EXPECT_EQ(b.missing_variables + b.incompatible_design + b.unsupported_method, 82u - 34u);
    EXPECT_EQ(feasibility_stats({}).percent, 0);
}
