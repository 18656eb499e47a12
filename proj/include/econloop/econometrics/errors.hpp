#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "econloop/core/error.hpp"

namespace econloop::econometrics {

enum class EstimationErrorKind { RankDeficient, InsufficientObservations, NoWithinVariation, EmptyCell, InvalidSpecification };

std::string_view to_string(EstimationErrorKind kind);

/// Structured estimation failure. `offending()` lists the variables, columns
/// or cells responsible; the orchestrator logs `detail()` on halt.
class EstimationError : public Error {
public:
    EstimationError(EstimationErrorKind kind, std::vector<std::string> offending, const std::string& message);

    EstimationErrorKind reason() const noexcept { return reason_; }
    const std::vector<std::string>& offending() const noexcept { return offending_; }
    nlohmann::json detail() const;

private:
    EstimationErrorKind reason_;
    std::vector<std::string> offending_;
};

/// Cluster-robust inference is impossible (fewer than two clusters).
class InferenceError : public Error {
public:
    explicit InferenceError(const std::string& message) : Error("InferenceError", message) {}
};

class PlanValidationError : public Error {
public:
    explicit PlanValidationError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

}  // namespace econloop::econometrics
