#include "geopulse/core/csv.h"

#include "geopulse/core/error.h"

namespace geopulse::csv {

std::vector<Row> read(std::istream& in) {
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  Row current;
  std::string field;
  bool in_quotes = false;

  auto finish_record = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    bool blank = current.fields.size() == 1 && current.fields[0].empty();
    if (!blank) rows.push_back(std::move(current));
    current = Row{};
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!in_quotes) current.line = line_no;
    for (std::size_t i = 0; i < line.size(); ++i) {
      char c = line[i];
      if (in_quotes) {
        if (c == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field.push_back('"');
            ++i;
          } else {
            in_quotes = false;
          }
        } else {
          field.push_back(c);
        }
      } else if (c == '"') {
        in_quotes = true;
      } else if (c == ',') {
        current.fields.push_back(std::move(field));
        field.clear();
      } else {
        field.push_back(c);
      }
    }
    if (in_quotes) {
      field.push_back('\n');
      continue;
    }
    finish_record();
  }
  if (in_quotes) {
    throw Error(ErrorCode::parse, "unterminated quoted field starting at line " +
                                      std::to_string(current.line));
  }
  return rows;
}

std::vector<Row> read_with_header(std::istream& in,
                                  const std::vector<std::string>& expected,
                                  std::string_view what) {
  auto rows = read(in);
  if (rows.empty()) {
    throw Error(ErrorCode::parse, std::string(what) + ": missing header row");
  }
  const auto& header = rows.front().fields;
  if (header != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw Error(ErrorCode::parse,
                std::string(what) + ": header must be '" + want + "'");
  }
  rows.erase(rows.begin());
  for (const auto& row : rows) {
    if (row.fields.size() != expected.size()) {
      throw Error(ErrorCode::parse,
                  std::string(what) + ": row at line " + std::to_string(row.line) +
                      " has " + std::to_string(row.fields.size()) +
                      " fields, expected " + std::to_string(expected.size()));
    }
  }
  return rows;
}

std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
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
    out << quote(fields[i]);
  }
  out << '\n';
}

}  // namespace geopulse::csv
