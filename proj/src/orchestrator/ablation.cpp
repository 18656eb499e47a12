#include "econloop/orchestrator/ablation.hpp"

#include <stdexcept>

#include <fmt/format.h>

#include "econloop/core/json.hpp"
#include "econloop/core/run_store.hpp"
#include "econloop/questions/generate.hpp"

namespace econloop::orchestrator {

AblationReport run_ablation(const AblationConfig& config) {
    if (!config.audit || !config.profile) throw std::invalid_argument("ablation needs the dataset audit and profile");
    if (config.rounds < 1 || config.n_per_round < 1) throw std::invalid_argument("rounds and n must be positive");
    AblationReport report;
    for (const auto& arm : config.arms) {
        if (!arm.backend) throw std::invalid_argument("ablation arm '" + arm.label + "' has no backend");
        AblationRow row;
        row.label = arm.label;
        row.mode = arm.mode;
        int next_id = 1;
        try {
            for (int r = 1; r <= config.rounds; ++r) {
                questions::GenerationRequest req;
                req.audit = config.audit;
                req.profile = config.profile;
                req.dataset_name = config.audit->dataset_id;
                req.domain = config.domain;
                req.n = config.n_per_round;
                req.mode = arm.mode;
                req.first_id = next_id;
                auto outcome = questions::generate_questions(req, *arm.backend);
                QuestionRound round;
                round.round = r;
                round.mode = arm.mode;
                for (auto& q : outcome.questions) {
                    // screening always sees the real dataset, whatever the prompt saw
                    auto rep = questions::screen(q, *config.audit, *config.profile);
                    round.candidates.push_back({std::move(q), std::move(rep)});
                }
                next_id += static_cast<int>(round.candidates.size());
                round.candidates = questions::rank(std::move(round.candidates));
                row.rounds.push_back(std::move(round));
            }
        } catch (const Error& e) {
            row.error = std::string(e.kind()) + ": " + e.what();
        }
        row.stats = questions::feasibility_stats(row.rounds);
        report.rows.push_back(std::move(row));
    }
    return report;
}

nlohmann::json AblationReport::to_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json rounds = nlohmann::json::array();
        for (const auto& round : r.rounds) rounds.push_back(nlohmann::json(round));
        nlohmann::json j{{"label", r.label},
                         {"mode", to_string(r.mode)},
                         {"questions", r.stats.n_questions},
                         {"feasible", r.stats.n_feasible},
                         {"share", r.stats.share},
                         {"percent", r.stats.percent},
                         {"failures",
                          {{"MissingVariables", r.stats.missing_variables},
                           {"IncompatibleDesign", r.stats.incompatible_design},
                           {"UnsupportedMethod", r.stats.unsupported_method}}},
                         {"rounds", std::move(rounds)}};
        j["error"] = r.error ? nlohmann::json(*r.error) : nlohmann::json();
        arr.push_back(std::move(j));
    }
    return {{"arms", arr}};
}

std::string AblationReport::render() const {
    std::string out = fmt::format("{:<16} {:>9} {:>14} {:>8} {:>8} {:>8}\n", "Condition", "Questions", "Feasible",
                                  "MissVar", "Design", "Method");
    for (const auto& r : rows) {
        out += fmt::format("{:<16} {:>9} {:>14} {:>8} {:>8} {:>8}\n", r.label, r.stats.n_questions,
                           fmt::format("{} ({}%)", r.stats.n_feasible, r.stats.percent), r.stats.missing_variables,
                           r.stats.incompatible_design, r.stats.unsupported_method);
        if (r.error) out += "  aborted: " + *r.error + "\n";
    }
    return out;
}

void write_ablation(const AblationReport& report, const std::filesystem::path& dir) {
    write_file(dir / "ablation.json", report.to_json().dump(2) + "\n");
    write_file(dir / "ablation.txt", report.render());
}

}  // namespace econloop::orchestrator
