#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "econloop/data/table.hpp"

namespace econloop::data {

struct CsvOptions {
    char delimiter = ',';
    std::vector<std::string> missing_tokens{"", "NA", "."};
    // Non-numeric columns with more distinct values than this are Text.
    std::size_t max_categories = 50;
};

/// Reads a header-first CSV file with RFC-4180 quoting and infers column kinds
/// in the order Binary, Integer, Numeric, Categorical (Text above
/// `max_categories` distinct values).
Table load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Table parse_csv(std::istream& in, const CsvOptions& options = {});

/// Splits raw CSV text into records. Exposed for the external-series reader.
std::vector<std::vector<std::string>> read_records(std::istream& in, char delimiter);

/// Writes a table back to CSV (missing cells as empty fields).
void write_csv(const Table& table, const std::filesystem::path& path);

/// Parses a complete numeric literal (leading/trailing spaces allowed).
bool parse_number(std::string_view text, double& out);

}  // namespace econloop::data
