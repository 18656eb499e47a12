#include "econloop/data/table.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace econloop::data {

Table::Table(std::vector<Column> columns) : columns_(std::move(columns)) {
    std::unordered_map<std::string, int> seen;
    for (const auto& c : columns_)
        if (seen[c.name]++) throw SchemaError("duplicate column name '" + c.name + "'");
}

std::optional<std::size_t> Table::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i].name == name) return i;
    return std::nullopt;
}

std::size_t Table::require_column(std::string_view name) const {
    if (auto i = column_index(name)) return *i;
    throw SchemaError("no column '" + std::string(name) + "'");
}

void Table::append_row(std::span<const Cell> cells) {
    if (cells.size() != n_cols())
        throw SchemaError("row has " + std::to_string(cells.size()) + " cells, expected " + std::to_string(n_cols()));
    cells_.insert(cells_.end(), cells.begin(), cells.end());
}

std::uint32_t Table::intern(std::string_view text) {
    std::string key(text);
    if (auto it = string_ids_.find(key); it != string_ids_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(strings_.size());
    strings_.push_back(key);
    string_ids_.emplace(std::move(key), id);
    return id;
}

std::string Table::display(const Cell& cell) const {
    switch (cell.kind()) {
        case Cell::Kind::Missing: return {};
        case Cell::Kind::Text: return strings_[cell.text_id()];
        case Cell::Kind::Numeric: {
            const double v = cell.number();
            if (v == std::floor(v) && std::abs(v) < 1e15) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.0f", v);
                return buf;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }
    }
    return {};
}

std::size_t Table::add_column(Column column) {
    if (column_index(column.name)) throw SchemaError("duplicate column name '" + column.name + "'");
    const std::size_t rows = n_rows();
    const std::size_t old_cols = n_cols();
    std::vector<Cell> widened;
    widened.reserve(rows * (old_cols + 1));
    for (std::size_t r = 0; r < rows; ++r) {
        widened.insert(widened.end(), cells_.begin() + static_cast<std::ptrdiff_t>(r * old_cols),
                       cells_.begin() + static_cast<std::ptrdiff_t>((r + 1) * old_cols));
        widened.emplace_back();
    }
    cells_ = std::move(widened);
    columns_.push_back(std::move(column));
    return columns_.size() - 1;
}

Table Table::select(std::span<const std::size_t> cols, const std::vector<bool>* keep) const {
    std::vector<Column> picked;
    for (auto c : cols) picked.push_back(columns_[c]);
    Table out(std::move(picked));
    out.strings_ = strings_;
    out.string_ids_ = string_ids_;
    std::vector<Cell> buffer(cols.size());
    for (std::size_t r = 0; r < n_rows(); ++r) {
        if (keep && !(*keep)[r]) continue;
        for (std::size_t i = 0; i < cols.size(); ++i) buffer[i] = at(r, cols[i]);
        out.cells_.insert(out.cells_.end(), buffer.begin(), buffer.end());
    }
    return out;
}

std::vector<double> Table::numeric_column(std::size_t col) const {
    std::vector<double> out(n_rows(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t r = 0; r < n_rows(); ++r)
        if (const Cell& c = at(r, col); c.is_number()) out[r] = c.number();
    return out;
}

std::size_t Table::count_missing() const {
    std::size_t n = 0;
    for (const auto& c : cells_) n += c.missing();
    return n;
}

bool Table::operator==(const Table& other) const {
    if (columns_ != other.columns_ || cells_.size() != other.cells_.size()) return false;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        const Cell& a = cells_[i];
        const Cell& b = other.cells_[i];
        if (a.kind() != b.kind()) return false;
        if (a.is_number() && a.number() != b.number()) return false;
        if (a.is_text() && strings_[a.text_id()] != other.strings_[b.text_id()]) return false;
    }
    return true;
}

}  // namespace econloop::data
