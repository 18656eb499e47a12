#include "econloop/dataprep/external.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "econloop/data/csv.hpp"

namespace econloop::dataprep {

void ExternalSeries::validate() const {
    if (key_var.empty() || value_var.empty()) throw ExternalValidationError(source_id + ": join and value names required");
    std::set<std::pair<std::string, double>> seen;
    for (const auto& r : rows) {
        if (r.key.empty()) throw ExternalValidationError(source_id + ": empty join key");
        if (time_var.has_value() != r.time.has_value())
            throw ExternalValidationError(source_id + ": row for key " + r.key + " has inconsistent time field");
        if (!seen.emplace(r.key, r.time.value_or(0.0)).second) {
            char buf[64] = "";
            if (r.time) std::snprintf(buf, sizeof buf, ",%.15g", *r.time);
            throw ExternalValidationError(source_id + ": duplicate key (" + r.key + buf + ")");
        }
    }
}

namespace {

ExternalSeries read_local(const LocalFile& src) {
    std::ifstream in(src.path, std::ios::binary);
    if (!in) throw LoadError(src.path.string(), "cannot open external series");
    const auto records = data::read_records(in, ',');
    if (records.empty()) throw ExternalValidationError(src.path.string() + ": empty file");
    const auto& header = records.front();
    if (header.size() != 2 && header.size() != 3)
        throw ExternalValidationError(src.path.string() + ": expected key[,time],value columns");

    ExternalSeries s;
    s.source_id = src.path.stem().string();
    s.key_var = header[0];
    if (header.size() == 3) s.time_var = header[1];
    s.value_var = header.back();
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& rec = records[i];
        if (rec.size() == 1 && rec[0].empty()) continue;
        const auto row_label = src.path.string() + " row " + std::to_string(i + 1);
        if (rec.size() != header.size()) throw ExternalValidationError(row_label + ": wrong field count");
        ExternalRow row;
        row.key = rec[0];
        if (s.time_var) {
            double t = 0;
            if (!data::parse_number(rec[1], t)) throw ExternalValidationError(row_label + ": non-numeric time");
            row.time = t;
        }
        if (!data::parse_number(rec.back(), row.value)) throw ExternalValidationError(row_label + ": non-numeric value");
        s.rows.push_back(std::move(row));
    }
    s.validate();
    return s;
}

}  // namespace

ExternalSeries fetch_external(const ExternalSource& source) {
    if (const auto* file = std::get_if<LocalFile>(&source)) return read_local(*file);
    const auto& stub = std::get<RemoteStub>(source);
    stub.canned.validate();
    return stub.canned;
}

}  // namespace econloop::dataprep
