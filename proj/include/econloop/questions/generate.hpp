#pragma once

#include <optional>
#include <string>
#include <vector>

#include "econloop/core/dataset.hpp"
#include "econloop/core/error.hpp"
#include "econloop/core/profile.hpp"
#include "econloop/core/question.hpp"
#include "econloop/llm/backend.hpp"

namespace econloop::questions {

/// No parseable question came back; the gate offers Regenerate.
class GenerationError : public Error {
public:
    explicit GenerationError(const std::string& message) : Error("GenerationError", message) {}
};

struct GenerationRequest {
    // Required in DatasetAware mode, never consulted in Unconstrained mode.
    const DatasetAudit* audit = nullptr;
    const DataProfile* profile = nullptr;
    std::string dataset_name;
    std::string domain;
    std::optional<std::string> constraints;
    int n = 8;
    GenerationMode mode = GenerationMode::DatasetAware;
    int first_id = 1;  // ids are q{first_id}, q{first_id+1}, ...
};

struct GenerationOutcome {
    std::vector<ResearchQuestion> questions;
    std::vector<std::string> warnings;  // one per dropped item
};

llm::LlmRequest build_question_prompt(const GenerationRequest& request);

/// Throws GenerationError when nothing parseable is returned; gateway errors
/// propagate.
GenerationOutcome generate_questions(const GenerationRequest& request, llm::LlmBackend& backend);

/// Parses one item of the "questions" array; nullopt with a reason on failure.
std::optional<ResearchQuestion> parse_question(const nlohmann::json& item, std::string& why);

}  // namespace econloop::questions
