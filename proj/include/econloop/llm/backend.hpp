#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "econloop/core/error.hpp"

namespace econloop::llm {

enum class RoleTag { QuestionGen, DraftGen, Critique, Review, RevisionPlan };

std::string_view to_string(RoleTag role);
RoleTag role_from_string(std::string_view text);

struct LlmRequest {
    RoleTag role = RoleTag::QuestionGen;
    std::string system_text;
    std::string user_text;
    int max_output_tokens = 4096;
    double temperature = 0.0;
};

struct LlmResponse {
    std::string text;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    std::string backend_id;
};

class GatewayError : public Error {
public:
    GatewayError(const std::string& message, bool retryable)
        : Error("GatewayError", message), retryable_(retryable) {}
    bool retryable() const noexcept { return retryable_; }

private:
    bool retryable_;
};

class FixtureExhausted : public Error {
public:
    explicit FixtureExhausted(RoleTag role)
        : Error("FixtureExhausted", "script fixture has no matching entry left for role " + std::string(to_string(role))),
          role_(role) {}
    RoleTag role() const noexcept { return role_; }

private:
    RoleTag role_;
};

/// Text-generation backend. Implementations are safe to share across runs.
class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual LlmResponse complete(const LlmRequest& request) = 0;
    virtual std::string id() const = 0;
};

/// Throws GatewayError (non-retryable) for an empty prompt.
void check_request(const LlmRequest& request);

/// Micro-dollars per token.
struct Price {
    std::int64_t input = 0;
    std::int64_t output = 0;
};

/// Per-backend token prices, loaded from configuration:
/// {"scripted": {"input": 3, "output": 15}, "live": {...}}
class PriceTable {
public:
    PriceTable() = default;
    explicit PriceTable(std::map<std::string, Price> prices) : prices_(std::move(prices)) {}

    static PriceTable from_json(const nlohmann::json& j);
    static PriceTable load(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    /// Unknown backends are priced at zero.
    Price lookup(const std::string& backend_id) const;
    void set(const std::string& backend_id, Price price) { prices_[backend_id] = price; }

private:
    std::map<std::string, Price> prices_;
};

/// Decorator that prices every completed call and reports it to an observer
/// (the run executor appends the ledger entry and the LlmCall event).
class MeteredBackend : public LlmBackend {
public:
    using Observer = std::function<void(const LlmRequest&, const LlmResponse&, const Price&)>;

    MeteredBackend(LlmBackend& inner, PriceTable prices, Observer observer)
        : inner_(inner), prices_(std::move(prices)), observer_(std::move(observer)) {}

    LlmResponse complete(const LlmRequest& request) override;
    std::string id() const override { return inner_.id(); }

private:
    LlmBackend& inner_;
    PriceTable prices_;
    Observer observer_;
};

}  // namespace econloop::llm
