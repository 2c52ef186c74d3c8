#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "scramble/series.hpp"

namespace scramble {

/// Column-oriented text table. Cells are stored as text so that mixed
/// numeric and label columns share one layout.
struct DataTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::map<std::string, std::string> metadata;

  void add_row(std::vector<std::string> row);
  std::size_t size() const noexcept { return rows.size(); }
  /// Column index by name; throws DomainError when absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> numeric_column(const std::string& name) const;
  /// Throws DomainError on ragged rows or cells that would break the CSV
  /// layout (commas, line breaks, a leading '#').
  void validate() const;
};

/// Columns "t" and the record label; metadata carried over.
DataTable table_from_record(const TimeSeriesRecord& rec);
/// Inverse of table_from_record. Needs exactly two numeric columns.
TimeSeriesRecord record_from_table(const DataTable& table);

/// CSV text: "# key: value" metadata lines in key order, the header row,
/// then one line per row. Numbers should already be formatted with
/// format_double.
std::string to_csv(const DataTable& table);
DataTable parse_csv(std::string_view text);

/// Writes to a temporary file next to `path` and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// Strict decimal parsing of a whole string; throws DomainError otherwise.
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

}  // namespace scramble
