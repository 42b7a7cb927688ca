#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace geopulse::csv {

struct Row {
  std::size_t line = 0;  // 1-based physical line of the record start
  std::vector<std::string> fields;
};

// RFC 4180 records: quoted fields may contain separators, doubled quotes and
// line breaks. Blank lines are skipped.
std::vector<Row> read(std::istream& in);

// Reads the first row as header and checks it against `expected`.
// Throws Error(parse) naming the mismatch.
std::vector<Row> read_with_header(std::istream& in,
                                  const std::vector<std::string>& expected,
                                  std::string_view what);

std::string quote(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace geopulse::csv
