#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "econloop/core/error.hpp"

namespace econloop::dataprep {

class ExternalValidationError : public Error {
public:
    explicit ExternalValidationError(const std::string& message) : Error("ExternalValidationError", message) {}
};

struct ExternalRow {
    std::string key;
    std::optional<double> time;
    double value = 0.0;

    bool operator==(const ExternalRow&) const = default;
};

/// A keyed series merged onto the analytic table. `key_var` (and `time_var`)
/// name the join columns in the main table; values land in `value_var`.
struct ExternalSeries {
    std::string source_id;
    std::string key_var;
    std::optional<std::string> time_var;
    std::string value_var;
    std::vector<ExternalRow> rows;

    /// Nonempty keys, no duplicate (key, time); throws ExternalValidationError.
    void validate() const;
    bool operator==(const ExternalSeries&) const = default;
};

struct LocalFile {
    std::filesystem::path path;
};

/// Stand-in for a remote statistics API: returns its canned series verbatim.
struct RemoteStub {
    ExternalSeries canned;
};

using ExternalSource = std::variant<LocalFile, RemoteStub>;

/// LocalFile reads `key[,time],value` CSV with a header; header names become
/// key_var / time_var / value_var and the file stem the source id.
ExternalSeries fetch_external(const ExternalSource& source);

}  // namespace econloop::dataprep
