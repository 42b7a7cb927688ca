#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "geopulse/core/gazetteer.h"
#include "geopulse/core/post.h"
#include "geopulse/core/time.h"
#include "geopulse/geo/mentions.h"

namespace geopulse::geo {

struct DisambiguationWeights {
  double alpha = 1.0;  // mean pairwise normalized distance
  double beta = 0.5;   // mean admin penalty
};

enum class SearchMethod { exhaustive, beam, native };

std::string to_string(SearchMethod m);
std::optional<SearchMethod> parse_search_method(const std::string& s);

struct ChosenPlace {
  std::string surface;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string entry_id;  // empty for native geotags
  GeoPoint point;
  int admin_level = 10;
  std::string provenance = "gazetteer";  // or "native"

  friend bool operator==(const ChosenPlace&, const ChosenPlace&) = default;
};

struct GeoResolution {
  std::string post_id;
  Timestamp created_at{};
  std::vector<ChosenPlace> places;  // one per mention, mention order
  double objective = 0.0;
  SearchMethod method = SearchMethod::exhaustive;

  // Most specific place (highest admin level, first on ties).
  GeoPoint primary_point() const;

  friend bool operator==(const GeoResolution&, const GeoResolution&) = default;
};

// (10 - admin_level) / 9: zero for the most specific places.
double admin_penalty(int admin_level);

// J = alpha * mean pairwise haversine / kMaxDistanceKm
//   + beta  * mean admin penalty
// The pairwise term is zero with fewer than two places.
double objective(std::span<const GazetteerEntry* const> choice, const DisambiguationWeights& w);

struct SearchLimits {
  std::size_t exhaustive_limit = 10'000;  // max size of the assignment product
  std::size_t beam_width = 32;
};

// Picks one candidate per mention minimizing J. Ties (|dJ| <= 1e-12) go to
// the larger total population, then to the lexicographically smaller
// entry-id sequence. Throws Error(contract) if any mention has no candidates.
GeoResolution disambiguate(std::span<const Mention> mentions, const DisambiguationWeights& w = {},
                           const SearchLimits& limits = {});

struct GeocodeOptions {
  DisambiguationWeights weights;
  SearchLimits limits;
  std::size_t max_tokens = 3;
};

// Native geotags bypass the gazetteer. Returns nullopt when nothing resolves.
std::optional<GeoResolution> geocode(const Post& post, const Gazetteer& gazetteer,
                                     const GeocodeOptions& options = {});

nlohmann::json to_json(const GeoResolution& r);
GeoResolution resolution_from_json(const nlohmann::json& j);

}  // namespace geopulse::geo
