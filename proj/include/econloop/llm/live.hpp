#pragma once

#include <chrono>
#include <string>

#include "econloop/llm/backend.hpp"

namespace econloop::llm {

/// Chat-completion endpoint settings. `from_env` reads ECONLOOP_LLM_URL,
/// ECONLOOP_LLM_API_KEY and ECONLOOP_LLM_MODEL.
struct LiveConfig {
    std::string url;  // full endpoint, e.g. https://host/v1/chat/completions
    std::string api_key;
    std::string model;
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{1000};
    std::chrono::seconds timeout{120};

    static LiveConfig from_env();
};

/// HTTP(S) backend speaking the common chat-completions JSON shape. Transport
/// failures, 429 and 5xx responses are retried with exponential backoff; after
/// `max_attempts` the error is fatal.
class LiveBackend : public LlmBackend {
public:
    explicit LiveBackend(LiveConfig config);

    LlmResponse complete(const LlmRequest& request) override;
    std::string id() const override { return "live"; }

private:
    LlmResponse attempt(const LlmRequest& request);

    LiveConfig config_;
    std::string scheme_host_port_;
    std::string path_;
};

}  // namespace econloop::llm
