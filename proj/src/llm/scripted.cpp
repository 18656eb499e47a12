#include "econloop/llm/scripted.hpp"

#include <fstream>

namespace econloop::llm {

std::int64_t estimate_tokens(std::string_view text) {
    return static_cast<std::int64_t>((text.size() + 3) / 4);
}

ScriptFixture ScriptFixture::from_json(const nlohmann::json& j) {
    ScriptFixture fx;
    for (const auto& e : j.at("entries")) {
        FixtureEntry entry;
        entry.role = role_from_string(e.at("role").get<std::string>());
        if (e.contains("match") && !e["match"].is_null()) entry.match = e["match"].get<std::string>();
        const auto& response = e.at("response");
        entry.response = response.is_string() ? response.get<std::string>() : response.dump();
        if (e.contains("input_tokens")) entry.input_tokens = e["input_tokens"].get<std::int64_t>();
        if (e.contains("output_tokens")) entry.output_tokens = e["output_tokens"].get<std::int64_t>();
        fx.entries.push_back(std::move(entry));
    }
    return fx;
}

ScriptFixture ScriptFixture::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError(path.string(), "cannot open script fixture");
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(path.string(), std::string("malformed script fixture (") + e.what() + ")");
    } catch (const std::invalid_argument& e) {
        throw LoadError(path.string(), std::string("malformed script fixture (") + e.what() + ")");
    }
}

nlohmann::json ScriptFixture::to_json() const {
    auto entries_json = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json j{{"role", to_string(e.role)}, {"response", e.response}};
        if (e.match) j["match"] = *e.match;
        if (e.input_tokens) j["input_tokens"] = *e.input_tokens;
        if (e.output_tokens) j["output_tokens"] = *e.output_tokens;
        entries_json.push_back(std::move(j));
    }
    return {{"entries", entries_json}};
}

void ScriptFixture::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PersistenceError(path.string(), "cannot write script fixture");
    out << to_json().dump(1) << "\n";
}

ScriptFixture& ScriptFixture::add(RoleTag role, std::string response, std::optional<std::string> match,
                                  std::optional<std::int64_t> input_tokens,
                                  std::optional<std::int64_t> output_tokens) {
    entries.push_back({role, std::move(match), std::move(response), input_tokens, output_tokens});
    return *this;
}

ScriptedBackend::ScriptedBackend(ScriptFixture fixture)
    : fixture_(std::move(fixture)), consumed_(fixture_.entries.size(), false) {}

LlmResponse ScriptedBackend::complete(const LlmRequest& request) {
    check_request(request);
    std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < fixture_.entries.size(); ++i) {
        const auto& e = fixture_.entries[i];
        if (consumed_[i] || e.role != request.role) continue;
        if (e.match && request.user_text.find(*e.match) == std::string::npos) continue;
        consumed_[i] = true;
        LlmResponse r;
        r.text = e.response;
        r.input_tokens = e.input_tokens.value_or(estimate_tokens(request.system_text) + estimate_tokens(request.user_text));
        r.output_tokens = e.output_tokens.value_or(estimate_tokens(e.response));
        r.backend_id = id();
        return r;
    }
    throw FixtureExhausted(request.role);
}

std::size_t ScriptedBackend::remaining(RoleTag role) const {
    std::lock_guard lock(mutex_);
    std::size_t n = 0;
    for (std::size_t i = 0; i < fixture_.entries.size(); ++i)
        n += !consumed_[i] && fixture_.entries[i].role == role;
    return n;
}

}  // namespace econloop::llm
