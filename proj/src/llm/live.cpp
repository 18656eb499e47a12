#include "econloop/llm/live.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace econloop::llm {

namespace {

std::string env_or_empty(const char* name) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : std::string();
}

}  // namespace

LiveConfig LiveConfig::from_env() {
    LiveConfig c;
    c.url = env_or_empty("ECONLOOP_LLM_URL");
    c.api_key = env_or_empty("ECONLOOP_LLM_API_KEY");
    c.model = env_or_empty("ECONLOOP_LLM_MODEL");
    if (c.model.empty()) c.model = "default";
    return c;
}

LiveBackend::LiveBackend(LiveConfig config) : config_(std::move(config)) {
    if (config_.url.empty()) throw GatewayError("live backend needs ECONLOOP_LLM_URL", false);
    if (config_.api_key.empty()) throw GatewayError("live backend needs ECONLOOP_LLM_API_KEY", false);
    if (config_.max_attempts < 1) throw GatewayError("max_attempts must be >= 1", false);
    const auto scheme_end = config_.url.find("://");
    if (scheme_end == std::string::npos) throw GatewayError("endpoint URL lacks a scheme: " + config_.url, false);
    const auto path_start = config_.url.find('/', scheme_end + 3);
    scheme_host_port_ = config_.url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : config_.url.substr(path_start);
}

LlmResponse LiveBackend::attempt(const LlmRequest& request) {
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    client.set_bearer_token_auth(config_.api_key);

    const nlohmann::json body{
        {"model", config_.model},
        {"max_tokens", request.max_output_tokens},
        {"temperature", request.temperature},
        {"messages",
         {{{"role", "system"}, {"content", request.system_text}}, {{"role", "user"}, {"content", request.user_text}}}},
    };
    auto res = client.Post(path_, body.dump(), "application/json");
    if (!res) throw GatewayError("transport failure: " + httplib::to_string(res.error()), true);
    if (res->status == 429 || res->status >= 500)
        throw GatewayError("HTTP " + std::to_string(res->status) + " from " + config_.url, true);
    if (res->status < 200 || res->status >= 300)
        throw GatewayError("HTTP " + std::to_string(res->status) + " from " + config_.url + ": " + res->body, false);

    try {
        const auto j = nlohmann::json::parse(res->body);
        LlmResponse out;
        out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
        if (j.contains("usage")) {
            const auto& u = j["usage"];
            out.input_tokens = u.value("prompt_tokens", std::int64_t{0});
            out.output_tokens = u.value("completion_tokens", std::int64_t{0});
        }
        if (out.input_tokens < 0 || out.output_tokens < 0) throw GatewayError("negative token usage reported", false);
        out.backend_id = id();
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw GatewayError(std::string("unreadable completion body: ") + e.what(), false);
    }
}

LlmResponse LiveBackend::complete(const LlmRequest& request) {
    check_request(request);
    auto backoff = config_.initial_backoff;
    for (int n = 1;; ++n) {
        try {
            return attempt(request);
        } catch (const GatewayError& e) {
            if (!e.retryable()) throw;
            if (n >= config_.max_attempts)
                throw GatewayError(std::string(e.what()) + " (gave up after " + std::to_string(n) + " attempts)", false);
        }
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
    }
}

}  // namespace econloop::llm
