#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "econloop/core/error.hpp"

namespace econloop::llm {

enum class SchemaTag { QuestionList, ReviewReport, RevisionPlan, Critique };

std::string_view to_string(SchemaTag tag);

class StructuredParseError : public Error {
public:
    explicit StructuredParseError(std::string raw)
        : Error("StructuredParseError", "no JSON object found in model output"), raw_(std::move(raw)) {}
    const std::string& raw_text() const noexcept { return raw_; }

private:
    std::string raw_;
};

class SchemaValidationError : public Error {
public:
    SchemaValidationError(SchemaTag tag, std::vector<std::string> fields);
    /// Missing or ill-typed field paths, e.g. "scores.clarity".
    const std::vector<std::string>& fields() const noexcept { return fields_; }

private:
    std::vector<std::string> fields_;
};

/// First well-formed JSON object in `text`; fenced ```json blocks are tried
/// before bare braces. Throws StructuredParseError.
nlohmann::json extract_json_object(std::string_view text);

/// Extracts and validates the object against the shape for `tag`. Unknown
/// fields are ignored.
nlohmann::json parse_structured(std::string_view text, SchemaTag tag);

/// The instruction appended to every agent prompt.
std::string json_contract(SchemaTag tag);

}  // namespace econloop::llm
