#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "econloop/core/dataset.hpp"
#include "econloop/core/error.hpp"

namespace econloop::data {

class ParseError : public Error {
public:
    ParseError(std::size_t row, const std::string& message)
        : Error("ParseError", row ? "row " + std::to_string(row) + ": " + message : message), row_(row) {}
    /// 1-based file row (the header is row 1); 0 when not row-specific.
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& message) : Error("SchemaError", message) {}
};

/// A cell is Missing, a number, or a text value interned in the owning table.
class Cell {
public:
    enum class Kind : std::uint8_t { Missing, Numeric, Text };

    Cell() = default;
    static Cell number(double v) { return Cell(Kind::Numeric, v, 0); }
    static Cell text(std::uint32_t id) { return Cell(Kind::Text, 0.0, id); }

    Kind kind() const { return kind_; }
    bool missing() const { return kind_ == Kind::Missing; }
    bool is_number() const { return kind_ == Kind::Numeric; }
    bool is_text() const { return kind_ == Kind::Text; }
    double number() const { return value_; }
    std::uint32_t text_id() const { return text_; }

    bool operator==(const Cell&) const = default;

private:
    Cell(Kind k, double v, std::uint32_t t) : value_(v), text_(t), kind_(k) {}

    double value_ = 0.0;
    std::uint32_t text_ = 0;
    Kind kind_ = Kind::Missing;
};

struct Column {
    std::string name;
    ValueKind kind = ValueKind::Numeric;

    bool operator==(const Column&) const = default;
};

/// Row-major table of cells. Text cells refer to a shared intern pool.
class Table {
public:
    Table() = default;
    explicit Table(std::vector<Column> columns);

    const std::vector<Column>& columns() const { return columns_; }
    std::size_t n_cols() const { return columns_.size(); }
    std::size_t n_rows() const { return n_cols() ? cells_.size() / n_cols() : 0; }
    bool empty() const { return n_rows() == 0; }

    std::optional<std::size_t> column_index(std::string_view name) const;
    /// Throws SchemaError when the column does not exist.
    std::size_t require_column(std::string_view name) const;

    const Cell& at(std::size_t row, std::size_t col) const { return cells_[row * n_cols() + col]; }
    Cell& at(std::size_t row, std::size_t col) { return cells_[row * n_cols() + col]; }
    std::span<const Cell> row(std::size_t r) const { return {cells_.data() + r * n_cols(), n_cols()}; }

    /// Appends one row; throws SchemaError unless it has n_cols() cells.
    void append_row(std::span<const Cell> cells);
    void reserve_rows(std::size_t n) { cells_.reserve(n * n_cols()); }

    std::uint32_t intern(std::string_view text);
    const std::string& text(std::uint32_t id) const { return strings_[id]; }
    /// Canonical string form of a cell ("" for Missing, %.17g for numbers).
    std::string display(const Cell& cell) const;

    void set_kind(std::size_t col, ValueKind kind) { columns_[col].kind = kind; }
    /// Adds a column filled with Missing; returns its index.
    std::size_t add_column(Column column);

    /// New table holding `cols` (in that order) and the rows where keep[r].
    Table select(std::span<const std::size_t> cols, const std::vector<bool>* keep = nullptr) const;

    /// Column values as doubles, NaN for missing or non-numeric cells.
    std::vector<double> numeric_column(std::size_t col) const;
    std::size_t count_missing() const;

    bool operator==(const Table& other) const;

private:
    std::vector<Column> columns_;
    std::vector<Cell> cells_;
    std::vector<std::string> strings_;
    std::unordered_map<std::string, std::uint32_t> string_ids_;
};

}  // namespace econloop::data
