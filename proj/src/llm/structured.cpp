#include "econloop/llm/structured.hpp"

#include <array>
#include <optional>

namespace econloop::llm {

namespace {

constexpr std::array<std::string_view, 4> kSchemaNames{"QuestionList", "ReviewReport", "RevisionPlan", "Critique"};

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
    return out;
}

// End (exclusive) of the brace-balanced span starting at `open`, honoring
// string literals and escapes.
std::optional<std::size_t> balanced_end(std::string_view text, std::size_t open) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{') ++depth;
        else if (c == '}' && --depth == 0) return i + 1;
    }
    return std::nullopt;
}

std::optional<nlohmann::json> first_object(std::string_view text) {
    for (std::size_t pos = text.find('{'); pos != std::string_view::npos; pos = text.find('{', pos + 1)) {
        auto end = balanced_end(text, pos);
        if (!end) continue;
        auto parsed = nlohmann::json::parse(text.substr(pos, *end - pos), nullptr, false);
        if (!parsed.is_discarded() && parsed.is_object()) return parsed;
    }
    return std::nullopt;
}

struct Checker {
    std::vector<std::string> bad;

    const nlohmann::json* field(const nlohmann::json& obj, const std::string& key, const std::string& path,
                                bool (nlohmann::json::*is)() const noexcept) {
        auto it = obj.find(key);
        if (it == obj.end() || !((*it).*is)()) {
            bad.push_back(path);
            return nullptr;
        }
        return &*it;
    }
};

}  // namespace

std::string_view to_string(SchemaTag tag) { return kSchemaNames[static_cast<std::size_t>(tag)]; }

SchemaValidationError::SchemaValidationError(SchemaTag tag, std::vector<std::string> fields)
    : Error("SchemaValidationError",
            std::string(to_string(tag)) + " output is missing or mistypes: " + join(fields)),
      fields_(std::move(fields)) {}

nlohmann::json extract_json_object(std::string_view text) {
    // Fenced blocks first.
    for (std::size_t open = text.find("```"); open != std::string_view::npos;) {
        const auto body_start = text.find('\n', open);
        if (body_start == std::string_view::npos) break;
        const auto close = text.find("```", body_start);
        if (close == std::string_view::npos) break;
        if (auto obj = first_object(text.substr(body_start, close - body_start))) return *obj;
        open = text.find("```", close + 3);
    }
    if (auto obj = first_object(text)) return *obj;
    throw StructuredParseError(std::string(text));
}

nlohmann::json parse_structured(std::string_view text, SchemaTag tag) {
    nlohmann::json j = extract_json_object(text);
    Checker c;
    using J = nlohmann::json;
    switch (tag) {
    case SchemaTag::QuestionList:
        c.field(j, "questions", "questions", &J::is_array);
        break;
    case SchemaTag::ReviewReport:
        if (auto* scores = c.field(j, "scores", "scores", &J::is_object)) {
            for (const char* key : {"novelty", "identification", "data_quality", "clarity", "policy_relevance"})
                c.field(*scores, key, std::string("scores.") + key, &J::is_number);
        }
        if (j.contains("revision_requests")) {
            if (auto* reqs = c.field(j, "revision_requests", "revision_requests", &J::is_array)) {
                for (std::size_t i = 0; i < reqs->size(); ++i) {
                    const auto path = "revision_requests[" + std::to_string(i) + "]";
                    if (!(*reqs)[i].is_object()) c.bad.push_back(path);
                    else c.field((*reqs)[i], "text", path + ".text", &J::is_string);
                }
            }
        }
        break;
    case SchemaTag::RevisionPlan:
        if (auto* specs = c.field(j, "specifications", "specifications", &J::is_array)) {
            for (std::size_t i = 0; i < specs->size(); ++i) {
                const auto path = "specifications[" + std::to_string(i) + "]";
                if (!(*specs)[i].is_object()) {
                    c.bad.push_back(path);
                    continue;
                }
                c.field((*specs)[i], "design", path + ".design", &J::is_string);
                c.field((*specs)[i], "outcome", path + ".outcome", &J::is_string);
            }
        }
        break;
    case SchemaTag::Critique:
        if (auto* sev = c.field(j, "severity", "severity", &J::is_string)) {
            const auto s = sev->get<std::string>();
            if (s != "Minor" && s != "Major") c.bad.push_back("severity");
        }
        if (auto* issues = c.field(j, "issues", "issues", &J::is_array)) {
            for (std::size_t i = 0; i < issues->size(); ++i)
                if (!(*issues)[i].is_string()) c.bad.push_back("issues[" + std::to_string(i) + "]");
        }
        break;
    }
    if (!c.bad.empty()) throw SchemaValidationError(tag, std::move(c.bad));
    return j;
}

std::string json_contract(SchemaTag tag) {
    switch (tag) {
    case SchemaTag::QuestionList:
        return "Respond with exactly one JSON object of the form "
               "{\"questions\": [{\"text\", \"outcome_var\", \"treatment_vars\": [], \"control_vars\": [], "
               "\"design\": \"OLS|FixedEffects|DiD|EventStudy\", \"domain_tag\", \"rationale\"}]}.";
    case SchemaTag::ReviewReport:
        return "Respond with exactly one JSON object of the form "
               "{\"scores\": {\"novelty\", \"identification\", \"data_quality\", \"clarity\", \"policy_relevance\"} "
               "(each 1-10), \"revision_requests\": [{\"kind\": \"RobustnessCheck|IdentificationDiscussion|"
               "VariableDescription|Exposition|Other\", \"text\"}]}.";
    case SchemaTag::RevisionPlan:
        return "Respond with exactly one JSON object of the form "
               "{\"specifications\": [{\"label\", \"design\", \"outcome\", \"regressors\": [], "
               "\"event_time_var\", \"leads\", \"lags\"}]}.";
    case SchemaTag::Critique:
        return "Respond with exactly one JSON object of the form "
               "{\"severity\": \"Minor|Major\", \"issues\": [\"...\"]}.";
    }
    return {};
}

}  // namespace econloop::llm
