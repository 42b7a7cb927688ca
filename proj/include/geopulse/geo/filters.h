#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "geopulse/core/polygon.h"
#include "geopulse/core/region.h"
#include "geopulse/geo/disambiguate.h"

namespace geopulse::geo {

// Planar ray casting on (lon, lat). Points on an edge or vertex are inside;
// points strictly inside a hole are outside.
bool point_in_polygon(GeoPoint point, const Polygon& polygon);

struct GeometryFilterResult {
  std::vector<std::size_t> kept;  // indices into the input
  std::vector<std::string> warnings;
};

// Keeps a resolution iff any chosen place lies in any monitored polygon.
// An empty monitored list drops everything and emits a warning.
GeometryFilterResult geometry_filter(std::span<const GeoResolution> resolutions,
                                     std::span<const Region> monitored);

inline constexpr double kDefaultEpsKm = 50.0;
inline constexpr std::size_t kDefaultMinPts = 3;

// Keeps point i iff at least min_pts points (itself included) lie within
// eps_km of it. Returns kept indices in input order.
std::vector<std::size_t> density_filter(std::span<const GeoPoint> points,
                                        double eps_km = kDefaultEpsKm,
                                        std::size_t min_pts = kDefaultMinPts);

}  // namespace geopulse::geo
