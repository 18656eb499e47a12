#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "econloop/core/question.hpp"
#include "econloop/llm/backend.hpp"
#include "econloop/llm/scripted.hpp"
#include "rng.hpp"

namespace econloop::testing {

// Simulated usage attached to every fixture entry, per role.
struct Usage {
    std::int64_t input;
    std::int64_t output;
};
Usage usage_for(llm::RoleTag role);

nlohmann::json question_json(const std::string& text, const std::string& outcome,
                             const std::vector<std::string>& treatments, const std::vector<std::string>& controls,
                             const std::string& design, const std::string& domain = "labor economics");
nlohmann::json review_json(const std::array<double, 5>& scores,
                           const std::vector<std::pair<std::string, std::string>>& requests = {});
nlohmann::json critique_json(const std::string& severity, const std::vector<std::string>& issues);
nlohmann::json event_study_plan_json();

/// Markdown manuscript with the five required sections and exactly `words`
/// whitespace-separated tokens.
std::string manuscript_body(int version, std::size_t words, const std::string& theme);
/// Plain whitespace token count (independent of the production counter).
std::size_t count_tokens(const std::string& text);

/// Eight candidates on the labor panel, seven feasible; q1 (training, fixed
/// effects) ranks first.
std::vector<nlohmann::json> happy_questions();

struct HappyPath {
    static constexpr std::array<double, 3> overalls{4.82, 5.8, 6.4};
    static constexpr std::size_t words_v1 = 5563;
    static constexpr std::size_t words_v2 = 6410;
    static constexpr std::size_t words_final = 7282;
};
/// Reviews v1..v3 climbing across the threshold, a RobustnessCheck on v1
/// that adds an event study, a Major self-critique on v2.
llm::ScriptFixture happy_path_fixture();

/// Top-ranked question regresses wages on birth year under fixed effects.
llm::ScriptFixture halting_fixture();

/// Round 1 as in the happy path, round 2 answers "focus on education" with
/// four schooling questions (q9..q12); v1 is accepted straight away.
llm::ScriptFixture regenerate_fixture();

struct ArmSpec {
    std::size_t feasible = 0;
    std::size_t missing = 0;
    std::size_t design = 0;
    std::size_t method = 0;
    std::size_t total() const { return feasible + missing + design + method; }
};
inline constexpr ArmSpec kAwareArm{69, 6, 3, 1};
inline constexpr ArmSpec kUnconstrainedArm{34, 30, 12, 6};
inline constexpr int kAblationPerRound = 6;
inline constexpr std::uint64_t kAwareSeed = 11;
inline constexpr std::uint64_t kUnconstrainedSeed = 12;
/// Question rounds of `per_round` items (the last may be short) whose
/// screening against the labor panel yields exactly the arm's counts.
llm::ScriptFixture ablation_fixture(const ArmSpec& arm, int per_round, std::uint64_t seed);
inline int ablation_rounds(const ArmSpec& arm, int per_round) {
    return static_cast<int>((arm.total() + static_cast<std::size_t>(per_round) - 1) / static_cast<std::size_t>(per_round));
}

/// Hand-labeled screening corpus against the labor panel: 10 with missing
/// variables, 10 with an incompatible design, 10 feasible.
struct LabeledQuestion {
    ResearchQuestion question;
    std::optional<FailureCause> expected;  // nullopt = feasible
};
std::vector<LabeledQuestion> screener_corpus();
nlohmann::json screener_corpus_json();
std::vector<LabeledQuestion> screener_corpus_from_json(const nlohmann::json& j);

/// {"scripted": {"input": 3, "output": 15}}
llm::PriceTable fixture_prices();

/// Random complete script for model-based runs: random question set (the
/// top one sometimes time-invariant), random review scores, critique
/// severities, malformed critiques and robustness requests.
llm::ScriptFixture random_script(Rng& rng);

}  // namespace econloop::testing
