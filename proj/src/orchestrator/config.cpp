#include "econloop/orchestrator/config.hpp"

#include <stdexcept>

#include "econloop/llm/live.hpp"
#include "econloop/llm/scripted.hpp"

namespace econloop::orchestrator {

BackendChoice BackendChoice::parse(const std::string& text) {
    BackendChoice c;
    if (text == "live") {
        c.kind = Kind::Live;
    } else if (text.rfind("scripted:", 0) == 0 && text.size() > 9) {
        c.kind = Kind::Scripted;
        c.fixture = text.substr(9);
    } else {
        throw std::invalid_argument("backend must be 'live' or 'scripted:<fixture>', got '" + text + "'");
    }
    return c;
}

std::string BackendChoice::describe() const {
    return kind == Kind::Live ? "live" : "scripted:" + fixture.string();
}

void RunConfig::validate() const {
    if (dataset_path.empty() && !preloaded) throw std::invalid_argument("dataset path is required");
    if (n_questions < 1) throw std::invalid_argument("n_questions must be positive");
    if (max_revision_iterations < 1) throw std::invalid_argument("max_revision_iterations must be positive");
    if (!(accept_threshold >= 1.0 && accept_threshold <= 10.0))
        throw std::invalid_argument("accept_threshold must lie in [1, 10]");
    if (mode == RunMode::Headless && policy == HeadlessPolicy::SelectById && select_id.empty())
        throw std::invalid_argument("SelectById policy needs a question id");
    if (domain.empty()) throw std::invalid_argument("domain is required");
    if (backend.kind == BackendChoice::Kind::Scripted && backend.fixture.empty())
        throw std::invalid_argument("scripted backend needs a fixture path");
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j{
        {"dataset", dataset_path.string()},
        {"domain", domain},
        {"n_questions", n_questions},
        {"mode", mode == RunMode::Headless ? "headless" : "interactive"},
        {"policy", policy == HeadlessPolicy::SelectTopRanked ? "SelectTopRanked" : "SelectById"},
        {"generation", generation_mode == GenerationMode::DatasetAware ? "aware" : "unconstrained"},
        {"llm", backend.describe()},
        {"accept_threshold", accept_threshold},
        {"max_revision_iterations", max_revision_iterations},
        {"out", output_root.string()},
        {"prices", prices.to_json()},
    };
    if (meta_path) j["meta"] = meta_path->string();
    if (!select_id.empty()) j["select_id"] = select_id;
    if (run_id) j["run_id"] = *run_id;
    auto rs = nlohmann::json::array();
    for (const auto& r : restrictions) rs.push_back({{"var", r.var}, {"op", dataprep::to_string(r.op)}, {"value", r.literal}});
    j["restrictions"] = rs;
    auto ts = nlohmann::json::array();
    for (const auto& t : transforms)
        ts.push_back({{"var", t.var}, {"kind", to_string(t.kind)}, {"threshold", t.threshold}});
    j["transforms"] = ts;
    auto ex = nlohmann::json::array();
    for (const auto& e : externals) ex.push_back(e.string());
    j["externals"] = ex;
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("run config must be a JSON object");
    RunConfig c;
    try {
        c.dataset_path = j.at("dataset").get<std::string>();
        if (j.contains("meta")) c.meta_path = j["meta"].get<std::string>();
        c.domain = j.value("domain", c.domain);
        c.n_questions = j.value("n_questions", c.n_questions);
        const auto mode = j.value("mode", std::string("headless"));
        if (mode != "headless" && mode != "interactive") throw std::invalid_argument("mode must be headless or interactive");
        c.mode = mode == "headless" ? RunMode::Headless : RunMode::Interactive;
        const auto policy = j.value("policy", std::string("SelectTopRanked"));
        if (policy != "SelectTopRanked" && policy != "SelectById")
            throw std::invalid_argument("policy must be SelectTopRanked or SelectById");
        c.policy = policy == "SelectById" ? HeadlessPolicy::SelectById : HeadlessPolicy::SelectTopRanked;
        c.select_id = j.value("select_id", std::string());
        const auto gen = j.value("generation", std::string("aware"));
        if (gen != "aware" && gen != "unconstrained") throw std::invalid_argument("generation must be aware or unconstrained");
        c.generation_mode = gen == "aware" ? GenerationMode::DatasetAware : GenerationMode::Unconstrained;
        c.backend = BackendChoice::parse(j.at("llm").get<std::string>());
        c.accept_threshold = j.value("accept_threshold", c.accept_threshold);
        c.max_revision_iterations = j.value("max_revision_iterations", c.max_revision_iterations);
        c.output_root = j.value("out", std::string("runs"));
        if (j.contains("prices")) c.prices = llm::PriceTable::from_json(j["prices"]);
        if (j.contains("run_id")) c.run_id = j["run_id"].get<std::string>();
        for (const auto& r : j.value("restrictions", nlohmann::json::array()))
            c.restrictions.push_back({r.at("var").get<std::string>(),
                                      dataprep::comparator_from_string(r.at("op").get<std::string>()),
                                      r.at("value").is_string() ? r["value"].get<std::string>() : r["value"].dump()});
        for (const auto& t : j.value("transforms", nlohmann::json::array()))
            c.transforms.push_back({t.at("var").get<std::string>(),
                                    transform_kind_from_string(t.at("kind").get<std::string>()),
                                    t.value("threshold", 0.0)});
        for (const auto& e : j.value("externals", nlohmann::json::array())) c.externals.push_back(e.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed run config: ") + e.what());
    } catch (const Error& e) {
        throw std::invalid_argument(std::string("malformed run config: ") + e.what());
    }
    c.validate();
    return c;
}

std::unique_ptr<llm::LlmBackend> make_backend(const BackendChoice& choice) {
    if (choice.kind == BackendChoice::Kind::Live) return std::make_unique<llm::LiveBackend>(llm::LiveConfig::from_env());
    return std::make_unique<llm::ScriptedBackend>(llm::ScriptFixture::load(choice.fixture));
}

}  // namespace econloop::orchestrator
