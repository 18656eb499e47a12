#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "econloop/core/dataset.hpp"
#include "econloop/core/error.hpp"
#include "econloop/data/table.hpp"

namespace econloop::data {

class AuditError : public Error {
public:
    AuditError(std::vector<std::string> missing, const std::string& message)
        : Error("AuditError", message), missing_(std::move(missing)) {}
    const std::vector<std::string>& missing() const noexcept { return missing_; }

private:
    std::vector<std::string> missing_;
};

struct PanelHint {
    std::string entity;
    std::string time;
};

/// Sidecar `<dataset_id>.meta.json`:
/// {"dataset_id": "...", "labels": {"var": "label"}, "panel": {"entity": "...", "time": "..."}}
struct DatasetMeta {
    std::string dataset_id;
    std::map<std::string, std::string> labels;
    std::optional<PanelHint> panel;
};

DatasetMeta load_meta(const std::filesystem::path& path);
void save_meta(const DatasetMeta& meta, const std::filesystem::path& path);

/// Builds the variable inventory. Panel columns become Identifier/TimeIndex
/// and the panel structure lists distinct entities and sorted waves.
DatasetAudit audit_dataset(const Table& table, const std::string& dataset_id,
                           const std::optional<PanelHint>& panel_hint = std::nullopt,
                           const std::map<std::string, std::string>& labels = {});

}  // namespace econloop::data
