#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "econloop/core/question.hpp"
#include "econloop/data/table.hpp"
#include "econloop/dataprep/sample.hpp"
#include "econloop/llm/backend.hpp"

namespace econloop::orchestrator {

enum class RunMode { Interactive, Headless };
enum class HeadlessPolicy { SelectTopRanked, SelectById };

struct BackendChoice {
    enum class Kind { Live, Scripted } kind = Kind::Scripted;
    std::filesystem::path fixture;  // Scripted only

    /// "live" or "scripted:<fixture path>".
    static BackendChoice parse(const std::string& text);
    std::string describe() const;
};

struct RunConfig {
    std::filesystem::path dataset_path;
    std::optional<std::filesystem::path> meta_path;  // default: <dataset stem>.meta.json next to the data
    std::string domain = "labor economics";
    int n_questions = 8;
    RunMode mode = RunMode::Headless;
    HeadlessPolicy policy = HeadlessPolicy::SelectTopRanked;
    std::string select_id;  // SelectById
    GenerationMode generation_mode = GenerationMode::DatasetAware;
    BackendChoice backend;
    double accept_threshold = 6.0;
    int max_revision_iterations = 4;
    std::filesystem::path output_root = "runs";
    llm::PriceTable prices;
    std::vector<dataprep::Restriction> restrictions;
    std::vector<dataprep::Transform> transforms;
    std::vector<std::filesystem::path> externals;  // key[,time],value CSV files
    std::optional<std::string> run_id;  // fixed id; generated otherwise

    // In-memory dataset used instead of reading dataset_path (not serialized).
    std::shared_ptr<const data::Table> preloaded;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
};

/// Creates the backend named by the config (LiveBackend reads credentials
/// from the environment).
std::unique_ptr<llm::LlmBackend> make_backend(const BackendChoice& choice);

}  // namespace econloop::orchestrator
