#pragma once

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <future>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "econloop/core/run_state.hpp"
#include "econloop/llm/backend.hpp"
#include "econloop/orchestrator/config.hpp"

namespace econloop::orchestrator {

/// Applies a gate decision to `state`: logs GateDecided and moves to
/// Collecting (Select), Questioning (Regenerate), Completed (Approve) or
/// Rejected (Reject). Throws GateStateError when the run is not waiting at
/// the decision's gate, UnknownCandidateError for a Select naming no
/// candidate of the current round, std::invalid_argument for an action that
/// does not belong to the gate.
Stage decide_gate(RunState& state, GateDecision decision);

/// Supplies decisions when the executor reaches a gate. The snapshot is the
/// persisted state at the moment the gate opened.
class GateResolver {
public:
    virtual ~GateResolver() = default;
    virtual GateDecision resolve(const RunState& snapshot, Gate gate) = 0;
    /// Called after a decision from resolve() was applied (or rejected with
    /// `error`). The default rethrows the error, which halts the run.
    virtual void acknowledge(const RunState& snapshot, const std::exception_ptr& error);
};

/// Headless policy: top-ranked feasible candidate (or the configured id),
/// publication auto-approved.
class PolicyResolver : public GateResolver {
public:
    explicit PolicyResolver(HeadlessPolicy policy, std::string select_id = {});
    GateDecision resolve(const RunState& snapshot, Gate gate) override;

private:
    HeadlessPolicy policy_;
    std::string select_id_;
};

/// Replays a fixed list of decisions; anything beyond the list falls back to
/// the top-ranked policy. Used by tests and scripted demos.
class QueuedResolver : public GateResolver {
public:
    explicit QueuedResolver(std::deque<GateDecision> decisions);
    GateDecision resolve(const RunState& snapshot, Gate gate) override;

private:
    std::deque<GateDecision> decisions_;
    PolicyResolver fallback_{HeadlessPolicy::SelectTopRanked};
};

/// Terminal fallback: prints candidates / the latest review and reads one
/// command per line:
///   select <id> | regenerate <constraints> | approve | reject <reason>
class TerminalResolver : public GateResolver {
public:
    TerminalResolver(std::istream& in, std::ostream& out);
    GateDecision resolve(const RunState& snapshot, Gate gate) override;
    void acknowledge(const RunState& snapshot, const std::exception_ptr& error) override;

private:
    std::istream& in_;
    std::ostream& out_;
};

/// Cross-thread hand-off. submit() enqueues a decision and returns a future
/// that resolves to the stage entered once the executor applied it, or holds
/// the gate error.
class ChannelResolver : public GateResolver {
public:
    std::future<Stage> submit(GateDecision decision);
    /// Unblocks a waiting executor; it halts with a cancellation error.
    void close();

    GateDecision resolve(const RunState& snapshot, Gate gate) override;
    void acknowledge(const RunState& snapshot, const std::exception_ptr& error) override;

private:
    struct Pending {
        GateDecision decision;
        std::promise<Stage> ack;
    };
    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Pending> queue_;
    std::optional<std::promise<Stage>> in_flight_;
    bool closed_ = false;
};

class RunCancelled : public Error {
public:
    RunCancelled() : Error("Cancelled", "run cancelled while waiting at a gate") {}
};

/// Runs one pipeline from Created to a terminal stage, persisting the run
/// directory after every stage.
class RunExecutor {
public:
    RunExecutor(RunConfig config, llm::LlmBackend& backend, GateResolver& resolver);

    /// Creates the run id and writes the Created snapshot.
    const RunState& initialize();
    /// Drives the run to Completed, Halted or Rejected.
    RunState run();

    const RunState& state() const { return state_; }
    std::filesystem::path run_dir() const { return config_.output_root / state_.run_id; }

private:
    void persist();
    void artifact(const std::string& actor, const std::string& name);
    void audit_and_profile();
    void question_loop();
    void collect();
    void analyze();
    void ensure_analytic_table(const std::vector<Specification>& specs);
    void write_draft();
    void critique();
    bool review_and_decide();
    void publication_gate();
    void halt(const std::string& kind, const nlohmann::json& detail);
    GateDecision await_gate(Gate gate);

    RunConfig config_;
    llm::LlmBackend& raw_backend_;
    std::unique_ptr<llm::LlmBackend> backend_;  // metered wrapper around raw_backend_
    GateResolver& resolver_;
    RunState state_;
    bool initialized_ = false;

    // working data that is not part of the persisted state
    std::shared_ptr<const data::Table> table_;
    std::optional<data::Table> analytic_;
    std::vector<dataprep::ExternalSeries> externals_;
    std::vector<RevisionRequest> pending_requests_;
    std::optional<std::string> stop_reason_;
};

/// Convenience wrapper: initialize + run.
RunState execute(const RunConfig& config, llm::LlmBackend& backend, GateResolver& resolver);

/// Resolver implied by the config's mode (Headless policy, or the terminal
/// on std::cin / std::cout).
std::unique_ptr<GateResolver> default_resolver(const RunConfig& config);

/// "<dataset>.meta.json" next to the data file, when present.
std::optional<std::filesystem::path> default_meta_path(const std::filesystem::path& dataset);

/// Fresh run id: run-YYYYmmdd-HHMMSS-xxxx.
std::string make_run_id();

}  // namespace econloop::orchestrator
