#include "econloop/llm/backend.hpp"

#include <array>
#include <fstream>

namespace econloop::llm {

namespace {
constexpr std::array<std::string_view, 5> kRoleNames{"QuestionGen", "DraftGen", "Critique", "Review", "RevisionPlan"};
}

std::string_view to_string(RoleTag role) { return kRoleNames[static_cast<std::size_t>(role)]; }

RoleTag role_from_string(std::string_view text) {
    for (std::size_t i = 0; i < kRoleNames.size(); ++i)
        if (kRoleNames[i] == text) return static_cast<RoleTag>(i);
    throw std::invalid_argument("unknown role tag '" + std::string(text) + "'");
}

void check_request(const LlmRequest& request) {
    if (request.system_text.empty() || request.user_text.empty())
        throw GatewayError("empty prompt for role " + std::string(to_string(request.role)), false);
    if (request.max_output_tokens <= 0) throw GatewayError("max_output_tokens must be positive", false);
    if (!(request.temperature >= 0.0)) throw GatewayError("temperature must be >= 0", false);
}

PriceTable PriceTable::from_json(const nlohmann::json& j) {
    std::map<std::string, Price> prices;
    for (const auto& [backend, p] : j.items()) {
        Price price{p.at("input").get<std::int64_t>(), p.at("output").get<std::int64_t>()};
        if (price.input < 0 || price.output < 0) throw std::invalid_argument("negative price for " + backend);
        prices[backend] = price;
    }
    return PriceTable(std::move(prices));
}

PriceTable PriceTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError(path.string(), "cannot open price table");
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(path.string(), std::string("malformed price table (") + e.what() + ")");
    }
}

nlohmann::json PriceTable::to_json() const {
    auto j = nlohmann::json::object();
    for (const auto& [backend, p] : prices_) j[backend] = {{"input", p.input}, {"output", p.output}};
    return j;
}

Price PriceTable::lookup(const std::string& backend_id) const {
    auto it = prices_.find(backend_id);
    return it == prices_.end() ? Price{} : it->second;
}

LlmResponse MeteredBackend::complete(const LlmRequest& request) {
    LlmResponse response = inner_.complete(request);
    if (observer_) observer_(request, response, prices_.lookup(response.backend_id));
    return response;
}

}  // namespace econloop::llm
