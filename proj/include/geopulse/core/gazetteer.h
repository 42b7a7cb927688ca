#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "geopulse/core/polygon.h"

namespace geopulse {

struct GazetteerEntry {
  std::string entry_id;
  std::string canonical_name;
  std::vector<std::string> alt_names;
  double lat = 0.0;
  double lon = 0.0;
  int admin_level = 8;  // 1 = largest area, 10 = most specific
  std::uint64_t population = 0;
  std::string country;  // ISO 3166-1 alpha-2
  std::optional<std::string> polygon_wkt;

  GeoPoint point() const { return GeoPoint{lat, lon}; }

  friend bool operator==(const GazetteerEntry&, const GazetteerEntry&) = default;
};

// Immutable after construction; safe to share across threads.
class Gazetteer {
 public:
  Gazetteer() = default;
  // Throws Error(validation) if an entry violates its invariants.
  explicit Gazetteer(std::vector<GazetteerEntry> entries);

  // Case- and compatibility-insensitive exact name lookup.
  std::vector<const GazetteerEntry*> lookup(std::string_view name) const;
  // Lookup by an already normalized key (see text::name_key).
  std::vector<const GazetteerEntry*> lookup_key(const std::string& key) const;

  const GazetteerEntry* find_id(std::string_view entry_id) const;

  std::span<const GazetteerEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  // Longest name in tokens; bounds the mention n-gram scan.
  std::size_t max_name_tokens() const { return max_name_tokens_; }

 private:
  std::vector<GazetteerEntry> entries_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_key_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::size_t max_name_tokens_ = 0;
};

extern const std::vector<std::string> kGazetteerColumns;

// Any malformed row is fatal: the error names the 1-based line.
Gazetteer load_gazetteer(std::istream& in);
Gazetteer load_gazetteer(const std::filesystem::path& path);

void write_gazetteer(std::ostream& out, std::span<const GazetteerEntry> entries);

}  // namespace geopulse
