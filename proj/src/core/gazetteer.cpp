#include "geopulse/core/gazetteer.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "geopulse/core/csv.h"
#include "geopulse/core/error.h"
#include "geopulse/core/text.h"

namespace geopulse {

const std::vector<std::string> kGazetteerColumns = {
    "entry_id", "canonical_name", "alt_names", "lat",     "lon",
    "admin_level", "population",  "country",   "polygon_wkt"};

namespace {

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::parse, std::string("invalid ") + what + " '" + s + "'");
  }
}

template <typename Int>
Int parse_int(const std::string& s, const char* what) {
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::parse, std::string("invalid ") + what + " '" + s + "'");
  }
  return v;
}

std::vector<std::string> split_alt_names(const std::string& s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto bar = s.find('|', start);
    out.push_back(s.substr(start, bar - start));
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return out;
}

void validate(const GazetteerEntry& e) {
  if (e.entry_id.empty()) throw Error(ErrorCode::validation, "empty entry_id");
  if (e.admin_level < 1 || e.admin_level > 10) {
    throw Error(ErrorCode::validation, "admin_level " + std::to_string(e.admin_level) +
                                           " outside [1,10]");
  }
  if (!valid_lat_lon(e.lat, e.lon)) {
    throw Error(ErrorCode::validation, "coordinates out of range");
  }
  if (text::fold(e.canonical_name).empty() || text::name_key(e.canonical_name).empty()) {
    throw Error(ErrorCode::validation, "canonical_name empty after normalization");
  }
  for (const auto& alt : e.alt_names) {
    if (text::name_key(alt).empty()) {
      throw Error(ErrorCode::validation, "alt name '" + alt + "' empty after normalization");
    }
  }
  if (e.country.size() != 2 || !std::all_of(e.country.begin(), e.country.end(), [](char c) {
        return c >= 'A' && c <= 'Z';
      })) {
    throw Error(ErrorCode::validation, "country must be ISO 3166-1 alpha-2, got '" +
                                           e.country + "'");
  }
  if (e.polygon_wkt) parse_wkt_polygon(*e.polygon_wkt);
}

}  // namespace

Gazetteer::Gazetteer(std::vector<GazetteerEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    validate(e);
    if (!by_id_.emplace(e.entry_id, i).second) {
      throw Error(ErrorCode::validation, "duplicate entry_id '" + e.entry_id + "'");
    }
    std::vector<std::string> keys;
    keys.push_back(text::name_key(e.canonical_name));
    for (const auto& alt : e.alt_names) keys.push_back(text::name_key(alt));
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (const auto& key : keys) {
      by_key_[key].push_back(i);
      auto n = static_cast<std::size_t>(std::count(key.begin(), key.end(), ' ') + 1);
      max_name_tokens_ = std::max(max_name_tokens_, n);
    }
  }
}

std::vector<const GazetteerEntry*> Gazetteer::lookup_key(const std::string& key) const {
  std::vector<const GazetteerEntry*> out;
  auto it = by_key_.find(key);
  if (it == by_key_.end()) return out;
  for (auto i : it->second) out.push_back(&entries_[i]);
  return out;
}

std::vector<const GazetteerEntry*> Gazetteer::lookup(std::string_view name) const {
  return lookup_key(text::name_key(name));
}

const GazetteerEntry* Gazetteer::find_id(std::string_view entry_id) const {
  auto it = by_id_.find(std::string(entry_id));
  return it == by_id_.end() ? nullptr : &entries_[it->second];
}

Gazetteer load_gazetteer(std::istream& in) {
  auto rows = csv::read_with_header(in, kGazetteerColumns, "gazetteer");
  std::vector<GazetteerEntry> entries;
  entries.reserve(rows.size());
  for (const auto& row : rows) {
    const auto& f = row.fields;
    try {
      GazetteerEntry e;
      e.entry_id = f[0];
      e.canonical_name = f[1];
      e.alt_names = split_alt_names(f[2]);
      e.lat = parse_double(f[3], "lat");
      e.lon = parse_double(f[4], "lon");
      e.admin_level = parse_int<int>(f[5], "admin_level");
      e.population = parse_int<std::uint64_t>(f[6], "population");
      e.country = f[7];
      if (!f[8].empty()) e.polygon_wkt = f[8];
      validate(e);
      entries.push_back(std::move(e));
    } catch (const Error& err) {
      throw Error(err.code(), "gazetteer row at line " + std::to_string(row.line) +
                                  ": " + err.what());
    }
  }
  try {
    return Gazetteer(std::move(entries));
  } catch (const Error& err) {
    throw Error(err.code(), std::string("gazetteer: ") + err.what());
  }
}

Gazetteer load_gazetteer(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open gazetteer " + path.string());
  return load_gazetteer(in);
}

void write_gazetteer(std::ostream& out, std::span<const GazetteerEntry> entries) {
  csv::write_row(out, kGazetteerColumns);
  for (const auto& e : entries) {
    std::string alts;
    for (const auto& a : e.alt_names) alts += (alts.empty() ? "" : "|") + a;
    std::ostringstream lat, lon;
    lat.precision(10);
    lon.precision(10);
    lat << e.lat;
    lon << e.lon;
    csv::write_row(out, {e.entry_id, e.canonical_name, alts, lat.str(), lon.str(),
                         std::to_string(e.admin_level), std::to_string(e.population),
                         e.country, e.polygon_wkt.value_or("")});
  }
}

}  // namespace geopulse
