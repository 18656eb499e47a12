#pragma once

#include "econloop/core/analysis.hpp"
#include "econloop/data/table.hpp"

namespace econloop::econometrics {

/// Checks the structural invariants of a specification (design-specific
/// fields, FE identifiers, cluster variable, event window). Throws
/// EstimationError(InvalidSpecification).
void check_specification(const Specification& spec);

// Each estimator uses the rows of `table` where its own variables are present
// (a missing event time marks a never-treated unit). result_id is left empty.

AnalysisResult estimate_ols(const data::Table& table, const Specification& spec);
AnalysisResult estimate_fe(const data::Table& table, const Specification& spec);
AnalysisResult estimate_did(const data::Table& table, const Specification& spec);
AnalysisResult estimate_event_study(const data::Table& table, const Specification& spec);

/// Dispatches on spec.design.
AnalysisResult estimate(const data::Table& table, const Specification& spec);

}  // namespace econloop::econometrics
