#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "econloop/core/analysis.hpp"
#include "econloop/core/dataset.hpp"
#include "econloop/core/question.hpp"
#include "econloop/core/review.hpp"
#include "econloop/llm/backend.hpp"

namespace econloop::econometrics {

/// Default mapping from a question to its headline specification:
///   OLS          -> HC1
///   FixedEffects -> entity + time effects, clustered by entity
///   DiD          -> treat/post/interaction, clustered by entity on panels, HC1 otherwise
///   EventStudy   -> leads 2, lags 2, omitted -1, entity + time effects, clustered by entity
Specification baseline_specification(const ResearchQuestion& question, const DatasetAudit& audit);

/// Mechanical checks of a specification against the audit; throws
/// PlanValidationError listing every problem.
void validate_specification(const Specification& spec, const DatasetAudit& audit);

/// Converts one RevisionPlan item into a specification, inheriting panel
/// identifiers and inference defaults from `baseline`.
Specification specification_from_json(const nlohmann::json& item, const Specification& baseline);

/// Builds the analysis plan. Without a prior plan the baseline is the only
/// specification. RobustnessCheck requests are turned into additional
/// specifications through one RevisionPlan call on `backend` (skipped when
/// there are none); existing specifications are kept and duplicates dropped.
AnalysisPlan plan(const ResearchQuestion& question, const DatasetAudit& audit,
                  const std::vector<RevisionRequest>& revision_requests = {}, llm::LlmBackend* backend = nullptr,
                  const AnalysisPlan* prior = nullptr);

}  // namespace econloop::econometrics
