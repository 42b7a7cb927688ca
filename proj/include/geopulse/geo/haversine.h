#pragma once

#include "geopulse/core/polygon.h"

namespace geopulse::geo {

inline constexpr double kEarthRadiusKm = 6371.0;
// Half the great-circle circumference; normalizes distances to [0,1].
inline constexpr double kMaxDistanceKm = 20015.09;

double haversine_km(GeoPoint a, GeoPoint b);

}  // namespace geopulse::geo
