#pragma once

#include <filesystem>
#include <string>

#include "econloop/core/run_state.hpp"

namespace econloop {

/// Writes the run directory `root/<run_id>`:
///
///   state.json                 full RunState (schema_version field)
///   events.log                 one JSON event per line
///   profile.json               when profiled
///   questions/round_{r}.json   every generation round with reports
///   drafts/draft_v{n}.md       one file per draft version
///   reviews/review_v{n}.json   one file per review
///   analysis/table_{k}.csv     per AnalysisResult
///   analysis/figure_{k}.csv    per event-study result
///   analysis/sample_report.json
///
/// Validates the state first (IntegrityError). Rewriting an unchanged state
/// produces identical bytes.
std::filesystem::path persist_run(const RunState& state, const std::filesystem::path& root);

/// Reconstructs a RunState from a directory written by persist_run. Throws
/// LoadError for a missing or corrupt state.json / events.log and
/// IntegrityError when the loaded state violates an invariant.
RunState load_run(const std::filesystem::path& run_dir);

/// Deterministic serialization used for state.json.
std::string serialize_state(const RunState& state);

/// Atomically replaces `path` with `content` (write to temp + rename).
void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace econloop
