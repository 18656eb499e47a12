#include "econloop/gateway/server.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <future>

#include <httplib.h>

#include "econloop/core/run_store.hpp"

namespace econloop::gateway {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool plausible_id(const std::string& id) {
    if (id.empty() || id == "." || id == "..") return false;
    for (char c : id)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) return false;
    return true;
}

Response json_response(int status, const json& body) { return {status, body.dump(), "application/json"}; }

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> out;
    const auto end = path.find('?');
    const std::string p = path.substr(0, end);
    std::size_t pos = 0;
    while (pos < p.size()) {
        auto next = p.find('/', pos);
        if (next == std::string::npos) next = p.size();
        if (next > pos) out.push_back(p.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

Stage awaiting(Gate gate) {
    return gate == Gate::QuestionSelection ? Stage::AwaitingQuestionGate : Stage::AwaitingPublicationGate;
}

int gate_round(const json& state, Gate gate) {
    return gate == Gate::QuestionSelection ? state.at("question_round").get<int>()
                                           : static_cast<int>(state.at("reviews").size());
}

}  // namespace

Response error_response(int status, const std::string& code, const std::string& message) {
    return json_response(status, {{"code", code}, {"message", message}});
}

json run_summary(const json& s) {
    json latest;
    if (!s.at("reviews").empty()) latest = s["reviews"].back().at("overall");
    return {{"run_id", s.at("run_id")},
            {"stage", s.at("stage")},
            {"question_round", s.at("question_round")},
            {"revision_iteration", s.at("revision_iteration")},
            {"latest_overall_score", latest},
            {"total_cost", s.at("cost").at("total_micro")},
            {"created_at", s.at("created_at_ms")}};
}

struct Service::LiveRun {
    std::unique_ptr<llm::LlmBackend> backend;
    orchestrator::ChannelResolver channel;
    std::unique_ptr<orchestrator::GateResolver> policy;  // headless runs
    std::unique_ptr<orchestrator::RunExecutor> executor;
    std::thread worker;
    std::mutex gate_mu;
    std::map<std::string, std::pair<GateDecision, json>> acks;  // "<gate>/<round>"
};

Service::Service(fs::path root, BackendFactory factory) : root_(std::move(root)), factory_(std::move(factory)) {
    fs::create_directories(root_);
}

Service::~Service() { shutdown(); }

void Service::shutdown() {
    std::map<std::string, std::shared_ptr<LiveRun>> runs;
    {
        std::lock_guard lock(mu_);
        runs = runs_;
    }
    for (auto& [id, run] : runs) run->channel.close();
    for (auto& [id, run] : runs)
        if (run->worker.joinable()) run->worker.join();
}

std::optional<json> Service::snapshot(const std::string& id) const {
    if (!plausible_id(id)) return std::nullopt;
    const auto path = root_ / id / "state.json";
    std::error_code ec;
    if (!fs::exists(path, ec)) return std::nullopt;
    try {
        return json::parse(read_file(path));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::shared_ptr<Service::LiveRun> Service::live(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = runs_.find(id);
    return it == runs_.end() ? nullptr : it->second;
}

Response Service::handle(const std::string& method, const std::string& path, const std::string& body) {
    const auto seg = split_path(path);
    auto not_found = [&] { return error_response(404, "NotFound", "no route for " + method + " " + path); };
    auto bad_method = [&] { return error_response(405, "MethodNotAllowed", method + " not allowed on " + path); };
    if (seg.empty() || seg[0] != "runs") return not_found();
    try {
        if (seg.size() == 1) {
            if (method == "GET") return list_runs();
            if (method == "POST") return create_run(body);
            return bad_method();
        }
        const auto& id = seg[1];
        if (seg.size() == 2) return method == "GET" ? get_run(id) : bad_method();
        if (seg.size() == 3) {
            if (seg[2] == "questions" || seg[2] == "reviews" || seg[2] == "events" || seg[2] == "cost")
                return method == "GET" ? get_part(id, seg[2]) : bad_method();
            return not_found();
        }
        if (seg.size() == 4 && seg[2] == "drafts") return method == "GET" ? get_draft(id, seg[3]) : bad_method();
        if (seg.size() == 4 && seg[2] == "gates") {
            if (method != "POST") return bad_method();
            if (seg[3] == "question") return post_gate(id, Gate::QuestionSelection, body);
            if (seg[3] == "publication") return post_gate(id, Gate::PublicationApproval, body);
        }
        return not_found();
    } catch (const std::exception& e) {
        return error_response(500, "InternalError", e.what());
    }
}

Response Service::create_run(const std::string& body) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        return error_response(400, "MalformedBody", e.what());
    }
    orchestrator::RunConfig config;
    try {
        config = orchestrator::RunConfig::from_json(j);
    } catch (const std::invalid_argument& e) {
        return error_response(400, "MalformedBody", e.what());
    }
    config.output_root = root_;

    auto run = std::make_shared<LiveRun>();
    try {
        run->backend = factory_ ? factory_(config) : orchestrator::make_backend(config.backend);
    } catch (const std::exception& e) {
        return error_response(400, "BackendUnavailable", e.what());
    }
    if (config.mode == orchestrator::RunMode::Headless)
        run->policy = std::make_unique<orchestrator::PolicyResolver>(config.policy, config.select_id);
    orchestrator::GateResolver& resolver =
        run->policy ? static_cast<orchestrator::GateResolver&>(*run->policy) : run->channel;

    std::lock_guard lock(mu_);
    if (config.run_id) {
        if (!plausible_id(*config.run_id)) return error_response(400, "MalformedBody", "run_id has invalid characters");
        if (runs_.count(*config.run_id) || fs::exists(root_ / *config.run_id))
            return error_response(409, "RunExists", "run " + *config.run_id + " already exists");
    } else {
        std::string id;
        do id = orchestrator::make_run_id();
        while (runs_.count(id) || fs::exists(root_ / id));
        config.run_id = id;
    }
    run->executor = std::make_unique<orchestrator::RunExecutor>(config, *run->backend, resolver);
    const auto& state = run->executor->initialize();
    const auto id = state.run_id;
    runs_[id] = run;
    run->worker = std::thread([run] {
        try {
            run->executor->run();
        } catch (const std::exception&) {
            // persistence failed while halting; the last snapshot stays on disk
        }
    });
    return json_response(201, {{"run_id", id}, {"stage", to_string(Stage::Created)}});
}

Response Service::list_runs() const {
    json out = json::array();
    std::error_code ec;
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(root_, ec))
        if (entry.is_directory()) ids.push_back(entry.path().filename().string());
    std::sort(ids.begin(), ids.end());
    for (const auto& id : ids)
        if (auto s = snapshot(id)) out.push_back(run_summary(*s));
    return json_response(200, out);
}

Response Service::get_run(const std::string& id) const {
    auto s = snapshot(id);
    if (!s) return error_response(404, "UnknownRun", "no run '" + id + "'");
    return json_response(200, *s);
}

Response Service::get_part(const std::string& id, const std::string& part) const {
    auto s = snapshot(id);
    if (!s) return error_response(404, "UnknownRun", "no run '" + id + "'");
    if (part == "questions")
        return json_response(200,
                             {{"run_id", id}, {"question_round", s->at("question_round")}, {"rounds", s->at("candidates")}});
    if (part == "reviews") return json_response(200, {{"run_id", id}, {"reviews", s->at("reviews")}});
    if (part == "events") return json_response(200, {{"run_id", id}, {"events", s->at("events")}});
    json cost = s->at("cost");
    cost["run_id"] = id;
    return json_response(200, cost);
}

Response Service::get_draft(const std::string& id, const std::string& version) const {
    auto s = snapshot(id);
    if (!s) return error_response(404, "UnknownRun", "no run '" + id + "'");
    int v = 0;
    try {
        std::size_t used = 0;
        v = std::stoi(version, &used);
        if (used != version.size()) throw std::invalid_argument(version);
    } catch (const std::exception&) {
        return error_response(400, "MalformedVersion", "draft version must be an integer");
    }
    for (const auto& d : s->at("drafts"))
        if (d.at("version").get<int>() == v) return {200, d.at("body").get<std::string>(), "text/markdown"};
    return error_response(404, "DraftNotFound", "run " + id + " has no draft v" + version);
}

Response Service::post_gate(const std::string& id, Gate gate, const std::string& body) {
    if (!snapshot(id)) return error_response(404, "UnknownRun", "no run '" + id + "'");
    GateDecision d;
    std::optional<int> round;
    try {
        const auto j = json::parse(body);
        if (!j.is_object()) throw std::invalid_argument("body must be a JSON object");
        d.gate = gate;
        d.action = gate_action_from_string(j.at("action").get<std::string>());
        d.argument = j.value("argument", std::string());
        d.decided_by = j.value("decided_by", std::string("pi"));
        if (j.contains("round")) round = j["round"].get<int>();
    } catch (const std::exception& e) {
        return error_response(400, "MalformedBody", e.what());
    }
    const bool question_action = d.action == GateAction::Select || d.action == GateAction::Regenerate;
    if (question_action != (gate == Gate::QuestionSelection))
        return error_response(400, "MalformedBody",
                              std::string(to_string(d.action)) + " does not belong to the " +
                                  std::string(to_string(gate)) + " gate");

    auto run = live(id);
    std::unique_lock<std::mutex> lock;
    if (run) lock = std::unique_lock(run->gate_mu);
    const auto state = snapshot(id);
    if (!state) return error_response(404, "UnknownRun", "no run '" + id + "'");
    const int current = gate_round(*state, gate);
    const auto key = std::string(to_string(gate)) + "/" + std::to_string(round.value_or(current));
    if (run) {
        auto it = run->acks.find(key);
        if (it != run->acks.end()) {
            if (it->second.first.same_choice(d)) return json_response(200, it->second.second);
            return error_response(409, "GateStateError", "gate " + key + " was already decided differently");
        }
    }
    const auto stage = state->at("stage").get<std::string>();
    if (round && *round != current)
        return error_response(409, "GateStateError", "round " + std::to_string(*round) + " is not the open round");
    if (stage != to_string(awaiting(gate)))
        return error_response(409, "GateStateError",
                              "run " + id + " is in stage " + stage + ", not waiting at the " +
                                  std::string(to_string(gate)) + " gate");
    if (!run || run->policy)
        return error_response(409, "GateStateError", "run " + id + " is not driven by this service's gates");

    auto fut = run->channel.submit(d);
    if (fut.wait_for(std::chrono::seconds(60)) != std::future_status::ready)
        return error_response(503, "Timeout", "the run did not acknowledge the decision");
    try {
        const Stage next = fut.get();
        json ack{{"run_id", id},
                 {"gate", to_string(gate)},
                 {"action", to_string(d.action)},
                 {"argument", d.argument},
                 {"round", round.value_or(current)},
                 {"stage", to_string(next)}};
        run->acks[key] = {d, ack};
        return json_response(200, ack);
    } catch (const UnknownCandidateError& e) {
        return error_response(409, e.kind(), e.what());
    } catch (const GateStateError& e) {
        return error_response(409, e.kind(), e.what());
    } catch (const orchestrator::RunCancelled& e) {
        return error_response(409, e.kind(), e.what());
    } catch (const std::invalid_argument& e) {
        return error_response(400, "MalformedBody", e.what());
    }
}

// --- HTTP ------------------------------------------------------------------

struct Server::Impl {
    httplib::Server svr;
};

Server::Server(std::string host, int port, fs::path root, BackendFactory factory)
    : host_(std::move(host)), port_(port), service_(std::move(root), std::move(factory)),
      impl_(std::make_unique<Impl>()) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        const auto r = service_.handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body, r.content_type.c_str());
    };
    impl_->svr.Get(".*", handler);
    impl_->svr.Post(".*", handler);
    impl_->svr.Put(".*", handler);
    impl_->svr.Delete(".*", handler);
}

Server::~Server() {
    stop();
    service_.shutdown();
}

int Server::bind() {
    if (port_ == 0) {
        const int p = impl_->svr.bind_to_any_port(host_);
        if (p < 0) throw std::runtime_error("cannot bind " + host_);
        port_ = p;
    } else if (!impl_->svr.bind_to_port(host_, port_)) {
        throw std::runtime_error("cannot bind " + host_ + ":" + std::to_string(port_));
    }
    return port_;
}

void Server::listen() { impl_->svr.listen_after_bind(); }

int Server::start() {
    const int p = bind();
    thread_ = std::thread([this] { listen(); });
    impl_->svr.wait_until_ready();
    return p;
}

void Server::stop() {
    impl_->svr.stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace econloop::gateway
