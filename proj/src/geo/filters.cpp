#include "geopulse/geo/filters.h"

#include <algorithm>
#include <cmath>

#include "geopulse/core/error.h"
#include "geopulse/geo/haversine.h"

namespace geopulse::geo {
namespace {

constexpr double kEdgeEpsilon = 1e-12;

bool on_segment(GeoPoint p, GeoPoint a, GeoPoint b) {
  double cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
  double scale = std::max({1.0, std::abs(b.lon - a.lon), std::abs(b.lat - a.lat)});
  if (std::abs(cross) > kEdgeEpsilon * scale) return false;
  return p.lon >= std::min(a.lon, b.lon) - kEdgeEpsilon &&
         p.lon <= std::max(a.lon, b.lon) + kEdgeEpsilon &&
         p.lat >= std::min(a.lat, b.lat) - kEdgeEpsilon &&
         p.lat <= std::max(a.lat, b.lat) + kEdgeEpsilon;
}

bool on_boundary(GeoPoint p, const std::vector<GeoPoint>& ring) {
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    if (on_segment(p, ring[j], ring[i])) return true;
  }
  return false;
}

bool crossing_inside(GeoPoint p, const std::vector<GeoPoint>& ring) {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const auto& a = ring[i];
    const auto& b = ring[j];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      double x = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
      if (p.lon < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

bool point_in_polygon(GeoPoint point, const Polygon& polygon) {
  if (polygon.outer.size() < 3) return false;
  if (on_boundary(point, polygon.outer)) return true;
  if (!crossing_inside(point, polygon.outer)) return false;
  for (const auto& hole : polygon.holes) {
    if (hole.size() < 3 || on_boundary(point, hole)) continue;
    if (crossing_inside(point, hole)) return false;
  }
  return true;
}

GeometryFilterResult geometry_filter(std::span<const GeoResolution> resolutions,
                                     std::span<const Region> monitored) {
  GeometryFilterResult out;
  if (monitored.empty()) {
    out.warnings.push_back("geometry filter has no monitored regions; every item is dropped");
    return out;
  }
  for (std::size_t i = 0; i < resolutions.size(); ++i) {
    bool hit = std::any_of(resolutions[i].places.begin(), resolutions[i].places.end(),
                           [&](const ChosenPlace& p) {
                             return std::any_of(monitored.begin(), monitored.end(),
                                                [&](const Region& r) {
                                                  return point_in_polygon(p.point, r.polygon);
                                                });
                           });
    if (hit) out.kept.push_back(i);
  }
  return out;
}

std::vector<std::size_t> density_filter(std::span<const GeoPoint> points, double eps_km,
                                        std::size_t min_pts) {
  if (!(eps_km >= 0.0)) throw Error(ErrorCode::invalid_argument, "eps_km must be non-negative");
  std::vector<std::size_t> neighbors(points.size(), 1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t k = i + 1; k < points.size(); ++k) {
      if (haversine_km(points[i], points[k]) <= eps_km) {
        ++neighbors[i];
        ++neighbors[k];
      }
    }
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (neighbors[i] >= min_pts) kept.push_back(i);
  }
  return kept;
}

}  // namespace geopulse::geo
