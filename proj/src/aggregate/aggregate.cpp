#include "geopulse/aggregate/aggregate.h"

#include <sstream>

#include "geopulse/core/csv.h"
#include "geopulse/core/error.h"
#include "geopulse/geo/filters.h"

namespace geopulse::aggregate {

Seconds parse_bucket(const std::string& name) {
  if (name == "hour") return Seconds{3600};
  if (name == "day") return Seconds{86400};
  throw Error(ErrorCode::invalid_argument, "bucket must be \"hour\" or \"day\", got \"" + name + "\"");
}

double rate_per_100k(std::int64_t count, std::uint64_t population) {
  if (population == 0) throw Error(ErrorCode::invalid_argument, "region population must be positive");
  return static_cast<double>(count) / static_cast<double>(population) * 100000.0;
}

std::optional<std::size_t> assign_region(GeoPoint point, std::span<const Region> regions) {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (geo::point_in_polygon(point, regions[i].polygon)) return i;
  }
  return std::nullopt;
}

AggregateResult aggregate(std::span<const geo::GeoResolution> resolutions, std::span<const Region> regions,
                          Seconds bucket_width) {
  if (bucket_width.count() <= 0) throw Error(ErrorCode::invalid_argument, "bucket width must be positive");
  AggregateResult out;
  out.bucket_width = bucket_width;
  out.resolutions = resolutions.size();
  // counts[region index or regions.size() for unassigned][bucket]
  std::vector<std::map<Timestamp, std::int64_t>> counts(regions.size() + 1);
  for (const auto& r : resolutions) {
    auto idx = r.places.empty() ? std::nullopt : assign_region(r.primary_point(), regions);
    ++counts[idx.value_or(regions.size())][floor_to(r.created_at, bucket_width)];
  }
  for (const auto& reg : regions) out.totals[reg.region_id] = 0;
  out.totals[kUnassigned] = 0;
  for (std::size_t i = 0; i <= regions.size(); ++i) {
    bool unassigned = i == regions.size();
    const std::string id = unassigned ? kUnassigned : regions[i].region_id;
    for (const auto& [bucket, n] : counts[i]) {
      RegionAggregate row{id, bucket, n, std::nullopt};
      if (!unassigned) row.rate_per_100k = rate_per_100k(n, regions[i].population);
      out.rows.push_back(row);
      out.totals[id] += n;
    }
  }
  return out;
}

void write_aggregate_csv(std::ostream& out, const AggregateResult& result) {
  csv::write_row(out, {"region_id", "bucket", "count", "rate_per_100k"});
  for (const auto& r : result.rows) {
    std::ostringstream rate;
    if (r.rate_per_100k) {
      rate.precision(17);
      rate << *r.rate_per_100k;
    }
    csv::write_row(out, {r.region_id, format_timestamp(r.bucket), std::to_string(r.count), rate.str()});
  }
}

}  // namespace geopulse::aggregate
