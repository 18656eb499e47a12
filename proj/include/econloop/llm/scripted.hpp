#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "econloop/llm/backend.hpp"

namespace econloop::llm {

struct FixtureEntry {
    RoleTag role = RoleTag::QuestionGen;
    std::optional<std::string> match;  // substring of user_text
    std::string response;
    // Simulated usage; absent counts are derived from text length.
    std::optional<std::int64_t> input_tokens;
    std::optional<std::int64_t> output_tokens;
};

/// Ordered script of canned responses. On disk:
/// {"entries": [{"role": "Review", "match": "draft v1", "response": "...",
///               "input_tokens": 1000, "output_tokens": 500}]}
/// `response` may also be a JSON object, stored as its compact dump.
struct ScriptFixture {
    std::vector<FixtureEntry> entries;

    static ScriptFixture from_json(const nlohmann::json& j);
    static ScriptFixture load(const std::filesystem::path& path);
    nlohmann::json to_json() const;
    void save(const std::filesystem::path& path) const;

    ScriptFixture& add(RoleTag role, std::string response, std::optional<std::string> match = std::nullopt,
                       std::optional<std::int64_t> input_tokens = std::nullopt,
                       std::optional<std::int64_t> output_tokens = std::nullopt);
};

/// Deterministic backend replaying a fixture. Within a role, entries are
/// consumed in script order; an entry with a `match` pattern is only taken by
/// a request whose user text contains it.
class ScriptedBackend : public LlmBackend {
public:
    explicit ScriptedBackend(ScriptFixture fixture);

    LlmResponse complete(const LlmRequest& request) override;
    std::string id() const override { return "scripted"; }

    std::size_t remaining(RoleTag role) const;

private:
    ScriptFixture fixture_;
    std::vector<bool> consumed_;
    mutable std::mutex mutex_;
};

/// Rough token estimate (4 characters per token, rounded up).
std::int64_t estimate_tokens(std::string_view text);

}  // namespace econloop::llm
