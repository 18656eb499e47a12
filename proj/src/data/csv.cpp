#include "econloop/data/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "econloop/core/run_store.hpp"

namespace econloop::data {

bool parse_number(std::string_view text, double& out) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return false;
    const char first = text.front();
    if (!(std::isdigit(static_cast<unsigned char>(first)) || first == '-' || first == '.')) return false;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(out);
}

std::vector<std::vector<std::string>> read_records(std::istream& in, char delimiter) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool any = false;  // current record has content
    char c;
    auto end_record = [&] {
        record.push_back(std::move(field));
        field.clear();
        records.push_back(std::move(record));
        record.clear();
        any = false;
    };
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            in_quotes = true;
            any = true;
        } else if (c == delimiter) {
            record.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n') {
            end_record();
        } else if (c == '\r') {
            if (in.peek() == '\n') in.get(c);
            end_record();
        } else {
            field += c;
            any = true;
        }
    }
    if (in_quotes) throw ParseError(records.size() + 1, "unterminated quoted field");
    if (any || !field.empty() || !record.empty()) end_record();
    return records;
}

namespace {

ValueKind infer_kind(const std::vector<const std::string*>& values, std::size_t max_categories) {
    bool numeric = true, binary = true, integral = true;
    for (const auto* v : values) {
        double x;
        if (!parse_number(*v, x)) {
            numeric = false;
            break;
        }
        if (x != 0.0 && x != 1.0) binary = false;
        if (x != std::floor(x)) integral = false;
    }
    if (numeric) {
        if (values.empty()) return ValueKind::Numeric;
        if (binary) return ValueKind::Binary;
        if (integral) return ValueKind::Integer;
        return ValueKind::Numeric;
    }
    std::unordered_set<std::string_view> distinct;
    for (const auto* v : values) {
        distinct.insert(*v);
        if (distinct.size() > max_categories) return ValueKind::Text;
    }
    return ValueKind::Categorical;
}

}  // namespace

Table parse_csv(std::istream& in, const CsvOptions& options) {
    auto records = read_records(in, options.delimiter);
    // Trailing blank lines are not rows.
    while (!records.empty() && records.back().size() == 1 && records.back()[0].empty()) records.pop_back();
    if (records.empty()) throw ParseError(0, "empty file");

    const auto& header = records.front();
    std::vector<Column> columns;
    std::unordered_set<std::string> names;
    for (const auto& name : header) {
        if (!names.insert(name).second) throw SchemaError("duplicate header name '" + name + "'");
        columns.push_back({name, ValueKind::Numeric});
    }
    const std::size_t n_cols = columns.size();
    for (std::size_t r = 1; r < records.size(); ++r)
        if (records[r].size() != n_cols)
            throw ParseError(r + 1, "expected " + std::to_string(n_cols) + " cells, found " +
                                        std::to_string(records[r].size()));

    const std::unordered_set<std::string> missing(options.missing_tokens.begin(), options.missing_tokens.end());
    const std::size_t n_rows = records.size() - 1;
    Table table(std::move(columns));
    std::vector<Cell> cells(n_rows * n_cols);

    std::vector<const std::string*> present;
    for (std::size_t c = 0; c < n_cols; ++c) {
        present.clear();
        for (std::size_t r = 0; r < n_rows; ++r) {
            const auto& v = records[r + 1][c];
            if (!missing.count(v)) present.push_back(&v);
        }
        const ValueKind kind = infer_kind(present, options.max_categories);
        table.set_kind(c, kind);
        const bool numeric = kind == ValueKind::Binary || kind == ValueKind::Integer || kind == ValueKind::Numeric;
        for (std::size_t r = 0; r < n_rows; ++r) {
            const auto& v = records[r + 1][c];
            if (missing.count(v)) continue;
            if (numeric) {
                double x = 0;
                parse_number(v, x);
                cells[r * n_cols + c] = Cell::number(x);
            } else {
                cells[r * n_cols + c] = Cell::text(table.intern(v));
            }
        }
    }
    table.reserve_rows(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r)
        table.append_row(std::span<const Cell>(cells.data() + r * n_cols, n_cols));
    return table;
}

Table load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open " + path.string());
    return parse_csv(in, options);
}

void write_csv(const Table& table, const std::filesystem::path& path) {
    auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
        std::string out = "\"";
        for (char c : s) {
            if (c == '"') out += '"';
            out += c;
        }
        return out + '"';
    };
    std::string out;
    for (std::size_t c = 0; c < table.n_cols(); ++c) {
        if (c) out += ',';
        out += quote(table.columns()[c].name);
    }
    out += '\n';
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        for (std::size_t c = 0; c < table.n_cols(); ++c) {
            if (c) out += ',';
            out += quote(table.display(table.at(r, c)));
        }
        out += '\n';
    }
    write_file(path, out);
}

}  // namespace econloop::data
