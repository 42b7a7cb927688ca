#include "geopulse/core/region.h"

#include <charconv>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "geopulse/core/csv.h"
#include "geopulse/core/error.h"

namespace geopulse {
namespace {

const std::vector<std::string> kColumns = {"region_id", "name", "population", "polygon_wkt"};

void validate(const Region& r, std::unordered_set<std::string>& ids) {
  if (r.region_id.empty()) throw Error(ErrorCode::validation, "empty region_id");
  if (r.population == 0) throw Error(ErrorCode::validation, "population must be positive");
  if (!ids.insert(r.region_id).second) {
    throw Error(ErrorCode::validation, "duplicate region_id '" + r.region_id + "'");
  }
}

std::vector<GeoPoint> ring_from_json(const nlohmann::json& ring) {
  std::vector<GeoPoint> out;
  for (const auto& p : ring) {
    if (!p.is_array() || p.size() < 2) {
      throw Error(ErrorCode::parse, "GeoJSON position must be [lon, lat]");
    }
    out.push_back(GeoPoint{p[1].get<double>(), p[0].get<double>()});
  }
  if (out.size() < 4) throw Error(ErrorCode::validation, "polygon ring needs at least 4 points");
  if (!(out.front() == out.back())) throw Error(ErrorCode::validation, "ring not closed");
  return out;
}

}  // namespace

std::vector<Region> load_regions_csv(std::istream& in) {
  auto rows = csv::read_with_header(in, kColumns, "regions");
  std::vector<Region> regions;
  std::unordered_set<std::string> ids;
  for (const auto& row : rows) {
    const auto& f = row.fields;
    try {
      Region r;
      r.region_id = f[0];
      r.name = f[1];
      auto [ptr, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), r.population);
      if (ec != std::errc() || ptr != f[2].data() + f[2].size()) {
        throw Error(ErrorCode::parse, "invalid population '" + f[2] + "'");
      }
      r.polygon = parse_wkt_polygon(f[3]);
      validate(r, ids);
      regions.push_back(std::move(r));
    } catch (const Error& e) {
      throw Error(e.code(), "regions row at line " + std::to_string(row.line) + ": " + e.what());
    }
  }
  return regions;
}

std::vector<Region> load_regions_geojson(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, std::string("regions GeoJSON: ") + e.what());
  }
  if (doc.value("type", "") != "FeatureCollection" || !doc.contains("features")) {
    throw Error(ErrorCode::parse, "regions GeoJSON must be a FeatureCollection");
  }
  std::vector<Region> regions;
  std::unordered_set<std::string> ids;
  std::size_t index = 0;
  for (const auto& f : doc["features"]) {
    try {
      const auto& props = f.at("properties");
      const auto& geom = f.at("geometry");
      if (geom.at("type").get<std::string>() != "Polygon") {
        throw Error(ErrorCode::parse, "only Polygon geometries are supported");
      }
      Region r;
      r.region_id = props.at("region_id").get<std::string>();
      r.name = props.value("name", r.region_id);
      r.population = props.at("population").get<std::uint64_t>();
      const auto& rings = geom.at("coordinates");
      if (!rings.is_array() || rings.empty()) throw Error(ErrorCode::parse, "empty polygon");
      r.polygon.outer = ring_from_json(rings[0]);
      for (std::size_t i = 1; i < rings.size(); ++i) {
        r.polygon.holes.push_back(ring_from_json(rings[i]));
      }
      validate(r, ids);
      regions.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::parse, "regions feature " + std::to_string(index) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), "regions feature " + std::to_string(index) + ": " + e.what());
    }
    ++index;
  }
  return regions;
}

std::vector<Region> load_regions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open regions file " + path.string());
  auto ext = path.extension().string();
  if (ext == ".geojson" || ext == ".json") return load_regions_geojson(in);
  return load_regions_csv(in);
}

void write_regions(std::ostream& out, std::span<const Region> regions) {
  csv::write_row(out, kColumns);
  for (const auto& r : regions) {
    csv::write_row(out, {r.region_id, r.name, std::to_string(r.population), to_wkt(r.polygon)});
  }
}

}  // namespace geopulse
