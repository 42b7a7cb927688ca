#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "geopulse/core/polygon.h"

namespace geopulse {

struct Region {
  std::string region_id;
  std::string name;
  Polygon polygon;
  std::uint64_t population = 1;

  friend bool operator==(const Region&, const Region&) = default;
};

// CSV with columns region_id,name,population,polygon_wkt.
std::vector<Region> load_regions_csv(std::istream& in);
// GeoJSON FeatureCollection of Polygon features with region_id, name and
// population properties.
std::vector<Region> load_regions_geojson(std::istream& in);
// Dispatches on extension: .geojson/.json -> GeoJSON, anything else -> CSV.
std::vector<Region> load_regions(const std::filesystem::path& path);

void write_regions(std::ostream& out, std::span<const Region> regions);

}  // namespace geopulse
