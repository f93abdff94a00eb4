#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace phishscan::detail {

/// Header-addressed CSV table. Supports double-quoted fields with "" escapes.
class CsvTable {
public:
  /// Throws ConfigError if the file is missing or lacks a header, ParseError on bad rows.
  static CsvTable read(const std::filesystem::path& path, const std::vector<std::string>& required_columns);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_.size(); }
  [[nodiscard]] const std::string& at(std::size_t row, const std::string& column) const;
  [[nodiscard]] bool has_column(const std::string& column) const { return columns_.contains(column); }
  [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }
  /// 1-based line number of a data row, for error messages.
  [[nodiscard]] std::size_t line_of(std::size_t row) const { return lines_[row]; }

private:
  std::filesystem::path path_;
  std::map<std::string, std::size_t> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::size_t> lines_;
};

std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);

}  // namespace phishscan::detail
