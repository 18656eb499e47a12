#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace econloop {

// Text marks a non-numeric column with too many distinct values to be used
// as a categorical regressor.
enum class ValueKind { Numeric, Integer, Categorical, Binary, Identifier, TimeIndex, Text };

std::string_view to_string(ValueKind kind);
ValueKind value_kind_from_string(std::string_view text);

/// Kinds that carry numeric moments in the profile.
inline bool is_measure(ValueKind kind) {
    return kind == ValueKind::Numeric || kind == ValueKind::Integer || kind == ValueKind::Binary;
}

struct VariableInfo {
    std::string name;
    ValueKind dtype = ValueKind::Numeric;
    std::optional<std::string> label;
    std::size_t n_nonmissing = 0;

    bool operator==(const VariableInfo&) const = default;
};

struct PanelStructure {
    std::string entity_var;
    std::string time_var;
    std::size_t n_entities = 0;
    std::vector<double> waves;  // strictly increasing

    bool operator==(const PanelStructure&) const = default;
};

struct DatasetAudit {
    std::string dataset_id;
    std::string source_path;
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<VariableInfo> variables;
    std::optional<PanelStructure> panel_structure;

    const VariableInfo* find(std::string_view name) const;
    bool operator==(const DatasetAudit&) const = default;
};

}  // namespace econloop
