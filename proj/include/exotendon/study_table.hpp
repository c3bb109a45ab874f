#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace exo {

struct Column {
  std::string name;
  std::string unit;

  bool operator==(const Column&) const = default;
};

/// Rectangular table of doubles with per-column units and ordered key=value
/// metadata. Serialized by export_csv; see README for the dialect.
class StudyTable {
 public:
  StudyTable() = default;
  explicit StudyTable(std::vector<Column> columns) : columns_(std::move(columns)) {}

  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  const std::vector<std::pair<std::string, std::string>>& metadata() const { return metadata_; }

  std::size_t num_rows() const { return rows_.size(); }
  std::size_t num_cols() const { return columns_.size(); }

  /// Throws std::invalid_argument if the row width differs from the column count.
  void add_row(std::vector<double> row);
  /// Replaces an existing key in place, otherwise appends.
  void set_meta(const std::string& key, const std::string& value);
  const std::string* meta(const std::string& key) const;

  std::size_t column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
  double at(std::size_t row, const std::string& name) const;

  bool operator==(const StudyTable&) const = default;

 private:
  std::vector<Column> columns_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::pair<std::string, std::string>> metadata_;
};

/// Formats a double with up to 12 significant digits ("%.12g"); -0 prints as 0.
std::string format_value(double v);

std::string to_csv(const StudyTable& table);
StudyTable parse_csv(const std::string& text);

/// Writes atomically (temp file + rename). Returns bytes written; throws
/// Error{IoFailure}.
std::size_t export_csv(const StudyTable& table, const std::filesystem::path& destination);
StudyTable import_csv(const std::filesystem::path& source);

/// Atomic text write shared by the CSV exporter and the run summary.
std::size_t write_file_atomic(const std::filesystem::path& destination, const std::string& bytes);

/// 64-bit FNV-1a, hex encoded; used for parameter fingerprints in metadata.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace exo
