#include "econloop/data/audit.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "econloop/core/run_store.hpp"

namespace econloop::data {

using nlohmann::json;

DatasetMeta load_meta(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw LoadError(path.string(), std::string("malformed metadata (") + e.what() + ")");
    }
    DatasetMeta meta;
    meta.dataset_id = j.value("dataset_id", path.stem().stem().string());
    if (auto it = j.find("labels"); it != j.end())
        for (const auto& [name, label] : it->items()) meta.labels[name] = label.get<std::string>();
    if (auto it = j.find("panel"); it != j.end() && !it->is_null())
        meta.panel = PanelHint{it->at("entity").get<std::string>(), it->at("time").get<std::string>()};
    return meta;
}

void save_meta(const DatasetMeta& meta, const std::filesystem::path& path) {
    json j = {{"dataset_id", meta.dataset_id}, {"labels", meta.labels}};
    if (meta.panel) j["panel"] = {{"entity", meta.panel->entity}, {"time", meta.panel->time}};
    write_file(path, j.dump(2) + "\n");
}

DatasetAudit audit_dataset(const Table& table, const std::string& dataset_id,
                           const std::optional<PanelHint>& panel_hint,
                           const std::map<std::string, std::string>& labels) {
    if (table.n_cols() == 0 || table.empty()) throw AuditError({}, "cannot audit an empty table");

    DatasetAudit audit;
    audit.dataset_id = dataset_id;
    audit.n_rows = table.n_rows();
    audit.n_cols = table.n_cols();
    audit.variables.reserve(table.n_cols());
    for (std::size_t c = 0; c < table.n_cols(); ++c) {
        VariableInfo info;
        info.name = table.columns()[c].name;
        info.dtype = table.columns()[c].kind;
        if (auto it = labels.find(info.name); it != labels.end()) info.label = it->second;
        for (std::size_t r = 0; r < table.n_rows(); ++r) info.n_nonmissing += !table.at(r, c).missing();
        audit.variables.push_back(std::move(info));
    }

    if (panel_hint) {
        std::vector<std::string> missing;
        const auto entity_col = table.column_index(panel_hint->entity);
        const auto time_col = table.column_index(panel_hint->time);
        if (!entity_col) missing.push_back(panel_hint->entity);
        if (!time_col) missing.push_back(panel_hint->time);
        if (!missing.empty()) {
            std::string names;
            for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
            throw AuditError(missing, "panel hint names absent columns: " + names);
        }

        PanelStructure panel;
        panel.entity_var = panel_hint->entity;
        panel.time_var = panel_hint->time;
        std::unordered_set<std::string> entities;
        std::set<double> waves;
        for (std::size_t r = 0; r < table.n_rows(); ++r) {
            const Cell& e = table.at(r, *entity_col);
            if (!e.missing()) entities.insert(table.display(e));
            const Cell& t = table.at(r, *time_col);
            if (t.is_text()) throw AuditError({}, "time variable '" + panel_hint->time + "' is not numeric");
            if (t.is_number()) waves.insert(t.number());
        }
        panel.n_entities = entities.size();
        panel.waves.assign(waves.begin(), waves.end());
        audit.variables[*entity_col].dtype = ValueKind::Identifier;
        audit.variables[*time_col].dtype = ValueKind::TimeIndex;
        audit.panel_structure = std::move(panel);
    }
    return audit;
}

}  // namespace econloop::data
