#include "geopulse/geo/haversine.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace geopulse::geo {

double haversine_km(GeoPoint a, GeoPoint b) {
  constexpr double rad = std::numbers::pi / 180.0;
  double phi1 = a.lat * rad;
  double phi2 = b.lat * rad;
  double dphi = (b.lat - a.lat) * rad;
  double dlambda = (b.lon - a.lon) * rad;
  double s1 = std::sin(dphi / 2.0);
  double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

}  // namespace geopulse::geo
