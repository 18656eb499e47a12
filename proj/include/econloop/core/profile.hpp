#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "econloop/core/dataset.hpp"

namespace econloop {

struct VariableProfile {
    std::string name;
    ValueKind kind = ValueKind::Numeric;
    // Moments are present only for Numeric, Integer and Binary columns with
    // at least one observation.
    std::optional<double> mean;
    std::optional<double> sd;
    std::optional<double> min;
    std::optional<double> max;
    std::optional<double> median;
    std::optional<double> skewness;
    double missing_rate = 0.0;
    std::size_t n_distinct = 0;
    std::vector<std::pair<std::string, std::size_t>> top_categories;

    bool operator==(const VariableProfile&) const = default;
};

struct Correlation {
    std::string var_a;
    std::string var_b;
    double pearson_r = 0.0;
    std::size_t n_pairs = 0;

    bool operator==(const Correlation&) const = default;
};

struct EndogeneityFlag {
    std::string var_a;
    std::string var_b;
    std::string reason;

    bool operator==(const EndogeneityFlag&) const = default;
};

enum class TransformKind { LogTransform, Standardize, BinaryRecode };

std::string_view to_string(TransformKind kind);
TransformKind transform_kind_from_string(std::string_view text);

struct TransformSuggestion {
    std::string var;
    TransformKind suggestion = TransformKind::LogTransform;
    std::string reason;

    bool operator==(const TransformSuggestion&) const = default;
};

struct MissingnessNote {
    std::string var;
    double missing_rate = 0.0;
    std::string note;

    bool operator==(const MissingnessNote&) const = default;
};

struct DataProfile {
    std::string dataset_id;
    std::size_t n_rows = 0;
    std::vector<VariableProfile> variable_profiles;
    std::vector<Correlation> correlations;
    std::vector<EndogeneityFlag> endogeneity_flags;
    std::vector<TransformSuggestion> transform_suggestions;
    std::vector<MissingnessNote> high_missingness;

    const VariableProfile* find(std::string_view name) const;
    const Correlation* find_correlation(std::string_view a, std::string_view b) const;
    bool operator==(const DataProfile&) const = default;
};

}  // namespace econloop
