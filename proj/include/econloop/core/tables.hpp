#pragma once

#include <string>

#include "econloop/core/analysis.hpp"

namespace econloop {

/// "***" below 0.001, "**" below 0.01, "*" below 0.05, otherwise empty.
std::string significance_stars(double p_value);

/// Regression table: header `term,estimate,se,t,p,ci_low,ci_high,stars` and
/// one row per coefficient, numerics with 17 significant digits.
std::string format_table_csv(const AnalysisResult& result);

/// Event-study figure data `event_time,estimate,ci_low,ci_high`, sorted by
/// event time. Empty string when the result carries no event-time terms.
std::string format_figure_csv(const AnalysisResult& result);

/// %.17g, with "nan"/"inf" spelled out.
std::string format_real(double value);

}  // namespace econloop
