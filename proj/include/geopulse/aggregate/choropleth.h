#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

#include "geopulse/aggregate/aggregate.h"

namespace geopulse::aggregate {

// GeoJSON FeatureCollection, one feature per region in file order, with
// properties count, rate_per_100k and the per-bucket series. Unassigned
// counts and the normalization unit go in the top-level "metadata".
nlohmann::json export_choropleth(const AggregateResult& result, std::span<const Region> regions,
                                 const std::optional<std::map<std::string, double>>& impact = std::nullopt);

}  // namespace geopulse::aggregate
