#include "olfact/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "olfact/error.hpp"

namespace olfact::csv {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

Table parse(std::string_view text, const std::string& source) {
  Table table;
  table.source = source;
  std::size_t line = 1;
  std::size_t pos = 0;
  bool have_header = false;
  // UTF-8 byte order mark
  if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;

  while (pos < text.size()) {
    Row row;
    row.line = line;
    std::string field;
    bool quoted_field = false;
    bool in_quotes = false;
    bool row_done = false;
    const std::size_t start_line = line;
    // Skip comment lines.
    if (text[pos] == '#') {
      while (pos < text.size() && text[pos] != '\n') ++pos;
      if (pos < text.size()) ++pos;
      ++line;
      continue;
    }
    while (!row_done) {
      if (pos >= text.size()) {
        if (in_quotes) throw ParseError(source, start_line, 0, "unterminated quoted field");
        row_done = true;
        break;
      }
      const char c = text[pos++];
      if (in_quotes) {
        if (c == '"') {
          if (pos < text.size() && text[pos] == '"') {
            field.push_back('"');
            ++pos;
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
          in_quotes = true;
          quoted_field = true;
          break;
        case ',':
          row.fields.push_back(quoted_field ? field : trim(field));
          field.clear();
          quoted_field = false;
          break;
        case '\r':
          break;
        case '\n':
          ++line;
          row_done = true;
          break;
        default:
          field.push_back(c);
      }
    }
    row.fields.push_back(quoted_field ? field : trim(field));
    if (row.fields.size() == 1 && row.fields[0].empty() && !quoted_field) continue;
    if (!have_header) {
      table.header = std::move(row);
      have_header = true;
    } else {
      table.rows.push_back(std::move(row));
    }
  }
  if (!have_header) throw ParseError(source, 0, 0, "missing header");
  return table;
}

Table read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

void expect_header_prefix(const Table& t, const std::vector<std::string>& prefix) {
  const auto& h = t.header.fields;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (i >= h.size() || h[i] != prefix[i]) {
      throw ParseError(t.source, t.header.line, i + 1,
                       "expected header column '" + prefix[i] + "'");
    }
  }
}

void expect_rectangular(const Table& t) {
  const std::size_t arity = t.header.fields.size();
  for (const Row& r : t.rows) {
    if (r.fields.size() != arity) {
      throw ParseError(t.source, r.line, 0,
                       "expected " + std::to_string(arity) + " fields, found " +
                           std::to_string(r.fields.size()));
    }
  }
}

double parse_real(const Table& t, const Row& row, std::size_t column) {
  const std::string& s = row.fields.at(column);
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || s.empty()) {
    throw ParseError(t.source, row.line, column + 1, "not a number: '" + s + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError(t.source, row.line, column + 1, "non-finite value: '" + s + "'");
  }
  return value;
}

std::string format_real(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos && !field.empty() &&
      field.front() != ' ' && field.back() != ' ' && field.front() != '#') {
    return std::string(field);
  }
  if (field.empty()) return std::string();
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

}  // namespace olfact::csv

namespace olfact::csv {

void write_comment(std::ostream& out, std::string_view text) {
  while (!text.empty()) {
    const auto nl = text.find('\n');
    out << "# " << text.substr(0, nl) << '\n';
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

}  // namespace olfact::csv
