#pragma once

// Minimal RFC 4180 reader/writer. Lines starting with '#' outside quotes are
// comments and are skipped.

#include <string>
#include <string_view>
#include <vector>

namespace oddforge::detail {

struct CsvRow {
  std::size_t line{};  // 1-based line on which the row starts
  std::vector<std::string> cells;
};

std::vector<CsvRow> parse_csv(std::string_view text);

std::string csv_escape(std::string_view cell);
std::string csv_join(const std::vector<std::string>& cells);

}  // namespace oddforge::detail
