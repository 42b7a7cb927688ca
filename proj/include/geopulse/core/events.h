#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "geopulse/core/time.h"

namespace geopulse {

// Active over the half-open interval [start, end).
struct EventRecord {
  std::string event_id;
  std::string event_type;
  std::string country;
  Timestamp start{};
  Timestamp end{};
  std::string name;

  bool active_during(Timestamp from, Timestamp to) const {
    return start < to && from < end;
  }

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

std::vector<EventRecord> load_events(std::istream& in);
std::vector<EventRecord> load_events(const std::filesystem::path& path);
void write_events(std::ostream& out, std::span<const EventRecord> events);

}  // namespace geopulse
