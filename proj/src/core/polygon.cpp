#include "geopulse/core/polygon.h"

#include <cmath>
#include <sstream>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include "geopulse/core/error.h"

namespace geopulse {
namespace {

namespace bg = boost::geometry;
// Open/closed and orientation left permissive so the closure check is ours.
using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint, true, true>;

template <typename Ring>
std::vector<GeoPoint> convert_ring(const Ring& ring) {
  std::vector<GeoPoint> out;
  out.reserve(ring.size());
  for (const auto& p : ring) out.push_back(GeoPoint{p.y(), p.x()});
  return out;
}

void check_ring(const std::vector<GeoPoint>& ring) {
  if (ring.size() < 4) {
    throw Error(ErrorCode::validation,
                "polygon ring needs at least 4 points (closed triangle)");
  }
  if (!(ring.front() == ring.back())) {
    throw Error(ErrorCode::validation, "ring not closed");
  }
  for (const auto& p : ring) {
    if (!valid_lat_lon(p.lat, p.lon)) {
      throw Error(ErrorCode::validation, "polygon coordinate out of range");
    }
  }
}

void write_ring(std::ostream& out, const std::vector<GeoPoint>& ring) {
  out << '(';
  for (std::size_t i = 0; i < ring.size(); ++i) {
    if (i) out << ", ";
    out << ring[i].lon << ' ' << ring[i].lat;
  }
  out << ')';
}

}  // namespace

bool valid_lat_lon(double lat, double lon) {
  return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 &&
         lat <= 90.0 && lon >= -180.0 && lon <= 180.0;
}

Polygon parse_wkt_polygon(std::string_view wkt) {
  BgPolygon poly;
  try {
    bg::read_wkt(std::string(wkt), poly);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::parse, std::string("invalid WKT polygon: ") + e.what());
  }
  Polygon out;
  out.outer = convert_ring(poly.outer());
  check_ring(out.outer);
  for (const auto& inner : poly.inners()) {
    out.holes.push_back(convert_ring(inner));
    check_ring(out.holes.back());
  }
  return out;
}

std::string to_wkt(const Polygon& polygon) {
  std::ostringstream out;
  out.precision(17);
  out << "POLYGON(";
  write_ring(out, polygon.outer);
  for (const auto& hole : polygon.holes) {
    out << ", ";
    write_ring(out, hole);
  }
  out << ')';
  return out.str();
}

}  // namespace geopulse
