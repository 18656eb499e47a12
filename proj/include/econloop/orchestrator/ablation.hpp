#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "econloop/core/dataset.hpp"
#include "econloop/core/profile.hpp"
#include "econloop/core/question.hpp"
#include "econloop/llm/backend.hpp"
#include "econloop/questions/screen.hpp"

namespace econloop::orchestrator {

struct AblationArm {
    std::string label;
    GenerationMode mode = GenerationMode::DatasetAware;
    llm::LlmBackend* backend = nullptr;
};

struct AblationConfig {
    const DatasetAudit* audit = nullptr;
    const DataProfile* profile = nullptr;
    std::string domain = "labor economics";
    int rounds = 1;
    int n_per_round = 8;
    std::vector<AblationArm> arms;  // usually DatasetAware then Unconstrained
};

struct AblationRow {
    std::string label;
    GenerationMode mode = GenerationMode::DatasetAware;
    questions::FeasibilityStats stats;
    std::vector<QuestionRound> rounds;
    std::optional<std::string> error;  // the arm was aborted
};

struct AblationReport {
    std::vector<AblationRow> rows;

    nlohmann::json to_json() const;
    /// Two-row comparison table: questions, feasible (share) and the failure
    /// breakdown by first failing criterion.
    std::string render() const;
};

/// Questioning + screening only, `rounds` rounds per arm. A generation or
/// gateway error aborts that arm (its row keeps the rounds completed so far
/// and records the error); other arms still run.
AblationReport run_ablation(const AblationConfig& config);

/// Writes ablation.json and ablation.txt under `dir`.
void write_ablation(const AblationReport& report, const std::filesystem::path& dir);

}  // namespace econloop::orchestrator
