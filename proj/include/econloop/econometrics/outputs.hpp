#pragma once

#include <filesystem>
#include <vector>

#include "econloop/core/analysis.hpp"

namespace econloop::econometrics {

/// Writes analysis/table_{k}.csv for every result (k from 1) and
/// analysis/figure_{m}.csv for every event-study result (m from 1) under
/// `dir`. Returns the written paths. I/O failures raise PersistenceError.
std::vector<std::filesystem::path> emit_outputs(const std::vector<AnalysisResult>& results,
                                                const std::filesystem::path& dir);

/// Plain-text coefficient table for prompts and terminal output.
std::string render_result(const AnalysisResult& result);

}  // namespace econloop::econometrics
