#include "geopulse/core/events.h"

#include <fstream>
#include <unordered_set>

#include "geopulse/core/csv.h"
#include "geopulse/core/error.h"

namespace geopulse {
namespace {
const std::vector<std::string> kColumns = {"event_id", "event_type", "country",
                                           "start",    "end",        "name"};
}

std::vector<EventRecord> load_events(std::istream& in) {
  auto rows = csv::read_with_header(in, kColumns, "events");
  std::vector<EventRecord> events;
  std::unordered_set<std::string> ids;
  for (const auto& row : rows) {
    const auto& f = row.fields;
    auto where = "events row at line " + std::to_string(row.line) + ": ";
    EventRecord e;
    e.event_id = f[0];
    e.event_type = f[1];
    e.country = f[2];
    e.name = f[5];
    if (e.event_id.empty()) throw Error(ErrorCode::validation, where + "empty event_id");
    if (!ids.insert(e.event_id).second) {
      throw Error(ErrorCode::validation, where + "duplicate event_id '" + e.event_id + "'");
    }
    auto start = try_parse_timestamp(f[3]);
    auto end = try_parse_timestamp(f[4]);
    if (!start || !end) throw Error(ErrorCode::parse, where + "invalid timestamp");
    e.start = *start;
    e.end = *end;
    if (!(e.start < e.end)) {
      throw Error(ErrorCode::validation, where + "event end must be after start");
    }
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<EventRecord> load_events(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open events file " + path.string());
  return load_events(in);
}

void write_events(std::ostream& out, std::span<const EventRecord> events) {
  csv::write_row(out, kColumns);
  for (const auto& e : events) {
    csv::write_row(out, {e.event_id, e.event_type, e.country, format_timestamp(e.start),
                         format_timestamp(e.end), e.name});
  }
}

}  // namespace geopulse
