#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace frontier_rd::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row
};

// RFC 4180 style: comma delimiter, double-quote quoting, CRLF or LF line
// endings, optional UTF-8 BOM. Blank lines are skipped. A row whose field
// count differs from the header raises ParseError with its line number.
Table read(std::istream& in, const std::string& source);

std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Shortest round-trip representation of a double.
std::string format_double(double value);

}  // namespace frontier_rd::csv
