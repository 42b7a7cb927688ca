#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace geopulse {

// UTC, second precision. Anything finer is truncated at parse time.
using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

// Accepts YYYY-MM-DD, YYYY-MM-DDTHH:MM[:SS[.fff]] with an optional
// Z / +HH:MM / -HH:MM / +HHMM designator (missing designator means UTC).
std::optional<Timestamp> try_parse_timestamp(std::string_view text);
Timestamp parse_timestamp(std::string_view text);

// Always YYYY-MM-DDTHH:MM:SSZ.
std::string format_timestamp(Timestamp t);

Timestamp floor_to(Timestamp t, Seconds width);
Timestamp ceil_to(Timestamp t, Seconds width);

}  // namespace geopulse
