#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace olfact::csv {

struct Row {
  std::size_t line = 0;  ///< 1-based line number in the file
  std::vector<std::string> fields;
};

struct Table {
  std::string source;
  Row header;
  std::vector<Row> rows;
};

/// Reads a comma-separated file with an optional double-quote escaping.
/// Blank lines and lines starting with '#' are skipped. Throws IoError when
/// the file cannot be opened and ParseError on an unterminated quote or a
/// missing header.
Table read(const std::string& path);
Table parse(std::string_view text, const std::string& source);

/// Throws ParseError unless the header starts with `prefix`.
void expect_header_prefix(const Table& t, const std::vector<std::string>& prefix);

/// Throws ParseError unless every row has the header's arity.
void expect_rectangular(const Table& t);

/// Parses a finite real; ParseError names the file, row and column.
double parse_real(const Table& t, const Row& row, std::size_t column);

/// Shortest representation that round-trips exactly.
std::string format_real(double x);

/// Quotes a field when it contains a comma, quote or newline.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Writes each line of `text` prefixed with "# ". Nothing for empty text.
void write_comment(std::ostream& out, std::string_view text);

}  // namespace olfact::csv
