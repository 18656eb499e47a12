#include "econloop/econometrics/errors.hpp"

#include <array>

namespace econloop::econometrics {

namespace {
constexpr std::array<std::string_view, 5> kNames{"RankDeficient", "InsufficientObservations", "NoWithinVariation",
                                                 "EmptyCell", "InvalidSpecification"};

std::string joined(const std::vector<std::string>& items, const char* sep) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : sep) + s;
    return out;
}
}  // namespace

std::string_view to_string(EstimationErrorKind kind) { return kNames[static_cast<std::size_t>(kind)]; }

EstimationError::EstimationError(EstimationErrorKind kind, std::vector<std::string> offending,
                                 const std::string& message)
    : Error("EstimationError", std::string(to_string(kind)) + ": " + message +
                                   (offending.empty() ? "" : " [" + joined(offending, ", ") + "]")),
      reason_(kind),
      offending_(std::move(offending)) {}

nlohmann::json EstimationError::detail() const {
    return {{"error", "EstimationError"}, {"kind", to_string(reason_)}, {"offending", offending_}, {"message", what()}};
}

PlanValidationError::PlanValidationError(std::vector<std::string> problems)
    : Error("PlanValidationError", "analysis plan is invalid: " + joined(problems, "; ")),
      problems_(std::move(problems)) {}

}  // namespace econloop::econometrics
