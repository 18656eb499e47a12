#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "econloop/orchestrator/pipeline.hpp"

namespace econloop::gateway {

struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

using BackendFactory = std::function<std::unique_ptr<llm::LlmBackend>(const orchestrator::RunConfig&)>;

/// Request handling behind the HTTP server, usable without a socket.
///
///   POST /runs                          RunConfig body -> 201 {run_id}
///   GET  /runs                          run summaries
///   GET  /runs/{id}                     full state
///   GET  /runs/{id}/questions           every round with its reports
///   POST /runs/{id}/gates/question      GateDecision body
///   POST /runs/{id}/gates/publication   GateDecision body
///   GET  /runs/{id}/drafts/{v}          markdown
///   GET  /runs/{id}/reviews | events | cost
///
/// Reads come from the persisted state.json, so every response is one
/// snapshot. Errors are {code, message}.
class Service {
public:
    explicit Service(std::filesystem::path root, BackendFactory factory = {});
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    Response handle(const std::string& method, const std::string& path, const std::string& body);

    Response create_run(const std::string& body);
    Response list_runs() const;
    Response get_run(const std::string& id) const;
    Response get_part(const std::string& id, const std::string& part) const;
    Response get_draft(const std::string& id, const std::string& version) const;
    Response post_gate(const std::string& id, Gate gate, const std::string& body);

    /// Cancels runs still waiting at a gate and joins their workers.
    void shutdown();

    const std::filesystem::path& root() const { return root_; }

private:
    struct LiveRun;

    std::optional<nlohmann::json> snapshot(const std::string& id) const;
    std::shared_ptr<LiveRun> live(const std::string& id) const;

    std::filesystem::path root_;
    BackendFactory factory_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<LiveRun>> runs_;
};

/// Projection of a persisted state onto the summary fields.
nlohmann::json run_summary(const nlohmann::json& state);

Response error_response(int status, const std::string& code, const std::string& message);

/// Binds `host:port` (port 0 picks a free one) and serves until stop().
class Server {
public:
    Server(std::string host, int port, std::filesystem::path root, BackendFactory factory = {});
    ~Server();

    /// Binds; returns the bound port or throws std::runtime_error.
    int bind();
    /// Blocks serving requests.
    void listen();
    /// bind + listen on a background thread.
    int start();
    void stop();

    Service& service() { return service_; }

private:
    struct Impl;
    std::string host_;
    int port_;
    Service service_;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
};

}  // namespace econloop::gateway
