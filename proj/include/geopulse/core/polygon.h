#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace geopulse {

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

// Rings are stored as read, lon/lat order in WKT, closed (first == last).
struct Polygon {
  std::vector<GeoPoint> outer;
  std::vector<std::vector<GeoPoint>> holes;

  friend bool operator==(const Polygon&, const Polygon&) = default;
};

// Parses "POLYGON((lon lat, ...), (hole...))". Throws Error(parse) on bad
// syntax and Error(validation) with "ring not closed" for open rings.
Polygon parse_wkt_polygon(std::string_view wkt);
std::string to_wkt(const Polygon& polygon);

bool valid_lat_lon(double lat, double lon);

}  // namespace geopulse
