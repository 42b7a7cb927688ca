#include "geopulse/aggregate/choropleth.h"

namespace geopulse::aggregate {

using nlohmann::json;

namespace {

json ring(const std::vector<GeoPoint>& pts) {
  json r = json::array();
  for (const auto& p : pts) r.push_back({p.lon, p.lat});
  return r;
}

}  // namespace

nlohmann::json export_choropleth(const AggregateResult& result, std::span<const Region> regions,
                                 const std::optional<std::map<std::string, double>>& impact) {
  json features = json::array();
  for (const auto& reg : regions) {
    json coords = json::array({ring(reg.polygon.outer)});
    for (const auto& h : reg.polygon.holes) coords.push_back(ring(h));
    json series = json::array();
    for (const auto& row : result.rows) {
      if (row.region_id != reg.region_id) continue;
      series.push_back({{"bucket", format_timestamp(row.bucket)}, {"count", row.count},
                        {"rate_per_100k", *row.rate_per_100k}});
    }
    auto total = result.totals.count(reg.region_id) ? result.totals.at(reg.region_id) : 0;
    json props = {{"region_id", reg.region_id},
                  {"name", reg.name},
                  {"population", reg.population},
                  {"count", total},
                  {"rate_per_100k", rate_per_100k(total, reg.population)},
                  {"series", series}};
    if (impact) {
      auto it = impact->find(reg.region_id);
      props["affected"] = it == impact->end() ? json(nullptr) : json(it->second);
    }
    features.push_back({{"type", "Feature"},
                        {"id", reg.region_id},
                        {"geometry", {{"type", "Polygon"}, {"coordinates", coords}}},
                        {"properties", props}});
  }
  auto unassigned = result.totals.count(kUnassigned) ? result.totals.at(kUnassigned) : 0;
  return {{"type", "FeatureCollection"},
          {"features", features},
          {"metadata",
           {{"normalization", "per 100000 inhabitants"},
            {"bucket_width_s", result.bucket_width.count()},
            {"resolutions", result.resolutions},
            {"unassigned", unassigned}}}};
}

}  // namespace geopulse::aggregate
