#include "frontier_rd/csv.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>

#include "frontier_rd/error.hpp"

namespace frontier_rd::csv {

Table read(std::istream& in, const std::string& source) {
  Table table;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;  // distinguishes an empty line from a row of one empty field
  bool at_bom_check = true;
  std::size_t line = 1;
  std::size_t row_line = 1;

  auto finish_row = [&]() {
    if (!field_started && fields.empty()) return;  // blank line
    fields.push_back(std::move(field));
    field.clear();
    if (table.header.empty()) {
      table.header = std::move(fields);
    } else {
      if (fields.size() != table.header.size()) {
        throw ParseError(source, row_line,
                         "expected " + std::to_string(table.header.size()) + " fields, found " +
                             std::to_string(fields.size()));
      }
      table.rows.push_back(std::move(fields));
      table.line_numbers.push_back(row_line);
    }
    fields.clear();
    field_started = false;
  };

  char c = 0;
  while (in.get(c)) {
    if (at_bom_check) {
      at_bom_check = false;
      if (static_cast<unsigned char>(c) == 0xEF) {
        char b1 = 0, b2 = 0;
        if (in.get(b1) && in.get(b2) && static_cast<unsigned char>(b1) == 0xBB &&
            static_cast<unsigned char>(b2) == 0xBF) {
          continue;
        }
        throw ParseError(source, line, "invalid byte sequence at start of file");
      }
    }
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) throw ParseError(source, line, "unexpected quote inside unquoted field");
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        if (in.peek() != '\n') throw ParseError(source, line, "bare carriage return");
        break;
      case '\n':
        finish_row();
        ++line;
        row_line = line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw ParseError(source, row_line, "unterminated quoted field");
  finish_row();
  if (table.header.empty()) throw ParseError(source, 1, "missing header row");
  return table;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

}  // namespace frontier_rd::csv
