#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "econloop/core/dataset.hpp"
#include "econloop/core/error.hpp"
#include "econloop/core/profile.hpp"
#include "econloop/core/run_state.hpp"
#include "econloop/data/table.hpp"
#include "econloop/dataprep/external.hpp"

namespace econloop::dataprep {

class SampleSpecError : public Error {
public:
    explicit SampleSpecError(const std::string& message) : Error("SampleSpecError", message) {}
};

class MergeError : public Error {
public:
    MergeError(std::string key, const std::string& message) : Error("MergeError", message), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class TransformError : public Error {
public:
    TransformError(std::string var, std::vector<std::size_t> rows, const std::string& message)
        : Error("TransformError", message), var_(std::move(var)), rows_(std::move(rows)) {}
    const std::string& var() const noexcept { return var_; }
    /// 1-based data rows holding offending values.
    const std::vector<std::size_t>& rows() const noexcept { return rows_; }

private:
    std::string var_;
    std::vector<std::size_t> rows_;
};

class EmptySampleError : public Error {
public:
    explicit EmptySampleError(const std::string& message) : Error("EmptySample", message) {}
};

enum class Comparator { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view to_string(Comparator op);
Comparator comparator_from_string(std::string_view text);

/// `var op literal`. Numeric literals compare numerically; a non-numeric
/// literal only supports Eq/Ne against text cells. Missing cells never pass.
struct Restriction {
    std::string var;
    Comparator op = Comparator::Eq;
    std::string literal;

    std::string describe() const;
};

struct Transform {
    std::string var;
    TransformKind kind = TransformKind::LogTransform;
    double threshold = 0.0;  // BinaryRecode: value > threshold -> 1
};

struct SampleSpec {
    std::vector<std::string> variables;
    std::vector<Restriction> restrictions;
    std::vector<std::string> listwise_on;
    std::vector<Transform> transforms;
    std::vector<std::string> id_vars;  // panel identifiers carried through
};

/// Every name must be an audited variable or an external value column.
void validate_sample_spec(const SampleSpec& spec, const DatasetAudit& audit,
                          const std::vector<ExternalSeries>& externals = {});

struct PreparedSample {
    data::Table table;
    SampleReport report;
};

/// merge -> transforms -> restrictions -> listwise deletion, recording the
/// row count after every step. The result holds id_vars then variables.
PreparedSample build_analytic_table(const data::Table& table, const SampleSpec& spec,
                                    const std::vector<ExternalSeries>& externals = {});

}  // namespace econloop::dataprep
