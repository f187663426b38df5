#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qspike::csv {

/// Shortest representation that parses back to the same double.
std::string format(double v);

/// Parses a full-field double; throws FormatError otherwise.
double parse_double(std::string_view field);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws FormatError when absent.
  std::size_t column(std::string_view name) const;
};

/// Reads a comma-separated file without quoting; the first line is the header.
Table read(const std::filesystem::path& path);

}  // namespace qspike::csv
