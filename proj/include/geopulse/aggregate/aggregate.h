#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "geopulse/core/region.h"
#include "geopulse/core/time.h"
#include "geopulse/geo/disambiguate.h"

namespace geopulse::aggregate {

inline constexpr const char* kUnassigned = "unassigned";

struct RegionAggregate {
  std::string region_id;  // or kUnassigned
  Timestamp bucket{};
  std::int64_t count = 0;
  std::optional<double> rate_per_100k;  // absent for unassigned

  friend bool operator==(const RegionAggregate&, const RegionAggregate&) = default;
};

struct AggregateResult {
  Seconds bucket_width{86400};
  std::size_t resolutions = 0;
  std::vector<RegionAggregate> rows;          // region file order, then bucket; unassigned last
  std::map<std::string, std::int64_t> totals; // per region id plus kUnassigned
};

// "hour" or "day".
Seconds parse_bucket(const std::string& name);

double rate_per_100k(std::int64_t count, std::uint64_t population);

// Index of the first region (file order) containing the point.
std::optional<std::size_t> assign_region(GeoPoint point, std::span<const Region> regions);

// Each resolution counts once, at its primary point and its created_at bucket.
AggregateResult aggregate(std::span<const geo::GeoResolution> resolutions, std::span<const Region> regions,
                          Seconds bucket_width);

void write_aggregate_csv(std::ostream& out, const AggregateResult& result);

}  // namespace geopulse::aggregate
