#pragma once

/// @file csv.hpp
/// Minimal comma-separated tables: a header row, no quoting, no embedded commas.

#include <string>
#include <string_view>
#include <vector>

namespace bannerforge {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column, or throws DataError naming it.
  [[nodiscard]] std::size_t column(std::string_view name) const;
  [[nodiscard]] bool has_column(std::string_view name) const;
};

/// Throws DataError on ragged rows ("line N").
[[nodiscard]] CsvTable parse_csv(std::string_view text);
[[nodiscard]] double parse_csv_number(const std::string& cell, std::size_t line, std::string_view column);
/// Shortest decimal form that round-trips the double.
[[nodiscard]] std::string format_number(double v);

}  // namespace bannerforge
