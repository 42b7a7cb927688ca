#include "geopulse/geo/disambiguate.h"

#include <algorithm>
#include <limits>

#include "geopulse/core/error.h"
#include "geopulse/geo/haversine.h"

namespace geopulse::geo {
namespace {

constexpr double kTieEpsilon = 1e-12;

struct Scored {
  std::vector<std::size_t> pick;  // candidate index per assigned mention
  double j = 0.0;
  std::uint64_t population = 0;
  std::vector<const GazetteerEntry*> entries;
};

// Strict "a is preferred over b".
bool better(const Scored& a, const Scored& b) {
  if (a.j < b.j - kTieEpsilon) return true;
  if (b.j < a.j - kTieEpsilon) return false;
  if (a.population != b.population) return a.population > b.population;
  for (std::size_t i = 0; i < std::min(a.entries.size(), b.entries.size()); ++i) {
    int c = a.entries[i]->entry_id.compare(b.entries[i]->entry_id);
    if (c != 0) return c < 0;
  }
  return a.entries.size() < b.entries.size();
}

Scored score(std::span<const Mention> mentions, std::vector<std::size_t> pick,
             const DisambiguationWeights& w) {
  Scored s;
  s.entries.reserve(pick.size());
  for (std::size_t m = 0; m < pick.size(); ++m) {
    s.entries.push_back(mentions[m].candidates[pick[m]]);
    s.population += s.entries.back()->population;
  }
  s.j = objective(s.entries, w);
  s.pick = std::move(pick);
  return s;
}

Scored exhaustive(std::span<const Mention> mentions, const DisambiguationWeights& w) {
  std::vector<std::size_t> pick(mentions.size(), 0);
  std::optional<Scored> best;
  while (true) {
    auto s = score(mentions, pick, w);
    if (!best || better(s, *best)) best = std::move(s);
    std::size_t m = 0;
    while (m < pick.size()) {
      if (++pick[m] < mentions[m].candidates.size()) break;
      pick[m] = 0;
      ++m;
    }
    if (m == pick.size()) break;
  }
  return *best;
}

Scored beam(std::span<const Mention> mentions, const DisambiguationWeights& w,
            std::size_t width) {
  std::vector<Scored> frontier{Scored{}};
  for (std::size_t m = 0; m < mentions.size(); ++m) {
    std::vector<Scored> next;
    next.reserve(frontier.size() * mentions[m].candidates.size());
    for (const auto& partial : frontier) {
      for (std::size_t c = 0; c < mentions[m].candidates.size(); ++c) {
        auto pick = partial.pick;
        pick.push_back(c);
        next.push_back(score(mentions, std::move(pick), w));
      }
    }
    std::sort(next.begin(), next.end(), better);
    if (next.size() > width) next.resize(width);
    frontier = std::move(next);
  }
  return frontier.front();
}

}  // namespace

std::string to_string(SearchMethod m) {
  switch (m) {
    case SearchMethod::exhaustive: return "exhaustive";
    case SearchMethod::beam: return "beam";
    case SearchMethod::native: return "native";
  }
  return "exhaustive";
}

std::optional<SearchMethod> parse_search_method(const std::string& s) {
  if (s == "exhaustive") return SearchMethod::exhaustive;
  if (s == "beam") return SearchMethod::beam;
  if (s == "native") return SearchMethod::native;
  return std::nullopt;
}

GeoPoint GeoResolution::primary_point() const {
  if (places.empty()) throw Error(ErrorCode::contract, "resolution without places");
  const ChosenPlace* best = &places.front();
  for (const auto& p : places) {
    if (p.admin_level > best->admin_level) best = &p;
  }
  return best->point;
}

double admin_penalty(int admin_level) { return (10.0 - admin_level) / 9.0; }

double objective(std::span<const GazetteerEntry* const> choice, const DisambiguationWeights& w) {
  if (choice.empty()) return 0.0;
  double pair_sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < choice.size(); ++i) {
    for (std::size_t k = i + 1; k < choice.size(); ++k) {
      pair_sum += haversine_km(choice[i]->point(), choice[k]->point()) / kMaxDistanceKm;
      ++pairs;
    }
  }
  double admin_sum = 0.0;
  for (const auto* e : choice) admin_sum += admin_penalty(e->admin_level);
  double pair_mean = pairs ? pair_sum / static_cast<double>(pairs) : 0.0;
  return w.alpha * pair_mean + w.beta * admin_sum / static_cast<double>(choice.size());
}

GeoResolution disambiguate(std::span<const Mention> mentions, const DisambiguationWeights& w,
                           const SearchLimits& limits) {
  if (mentions.empty()) throw Error(ErrorCode::contract, "disambiguate needs at least one mention");
  std::size_t product = 1;
  for (const auto& m : mentions) {
    if (m.candidates.empty()) {
      throw Error(ErrorCode::contract, "mention '" + m.surface + "' has no candidates");
    }
    if (product <= limits.exhaustive_limit) product *= m.candidates.size();
  }

  GeoResolution r;
  Scored best;
  if (product <= limits.exhaustive_limit) {
    best = exhaustive(mentions, w);
    r.method = SearchMethod::exhaustive;
  } else {
    best = beam(mentions, w, std::max<std::size_t>(1, limits.beam_width));
    r.method = SearchMethod::beam;
  }
  r.objective = best.j;
  for (std::size_t m = 0; m < mentions.size(); ++m) {
    const auto* e = best.entries[m];
    r.places.push_back(ChosenPlace{mentions[m].surface, mentions[m].begin, mentions[m].end,
                                   e->entry_id, e->point(), e->admin_level, "gazetteer"});
  }
  return r;
}

std::optional<GeoResolution> geocode(const Post& post, const Gazetteer& gazetteer,
                                     const GeocodeOptions& options) {
  if (post.native_geo) {
    GeoResolution r;
    r.post_id = post.id;
    r.created_at = post.created_at;
    r.method = SearchMethod::native;
    r.places.push_back(ChosenPlace{"", 0, 0, "", *post.native_geo, 10, "native"});
    return r;
  }
  auto mentions = extract_mentions(post.text, gazetteer, options.max_tokens);
  if (mentions.empty()) return std::nullopt;
  auto r = disambiguate(mentions, options.weights, options.limits);
  r.post_id = post.id;
  r.created_at = post.created_at;
  return r;
}

nlohmann::json to_json(const GeoResolution& r) {
  nlohmann::json places = nlohmann::json::array();
  for (const auto& p : r.places) {
    nlohmann::json jp = {{"entry_id", p.entry_id.empty() ? nlohmann::json(nullptr)
                                                         : nlohmann::json(p.entry_id)},
                         {"lat", p.point.lat},
                         {"lon", p.point.lon},
                         {"admin_level", p.admin_level},
                         {"provenance", p.provenance}};
    if (!p.surface.empty()) {
      jp["surface"] = p.surface;
      jp["span"] = {p.begin, p.end};
    }
    places.push_back(std::move(jp));
  }
  return {{"post_id", r.post_id},
          {"created_at", format_timestamp(r.created_at)},
          {"places", std::move(places)},
          {"objective", r.objective},
          {"method", to_string(r.method)}};
}

GeoResolution resolution_from_json(const nlohmann::json& j) {
  try {
    GeoResolution r;
    r.post_id = j.at("post_id").get<std::string>();
    r.created_at = parse_timestamp(j.at("created_at").get<std::string>());
    r.objective = j.at("objective").get<double>();
    auto method = parse_search_method(j.at("method").get<std::string>());
    if (!method) throw Error(ErrorCode::parse, "unknown resolution method");
    r.method = *method;
    for (const auto& jp : j.at("places")) {
      ChosenPlace p;
      if (!jp.at("entry_id").is_null()) p.entry_id = jp["entry_id"].get<std::string>();
      p.point = GeoPoint{jp.at("lat").get<double>(), jp.at("lon").get<double>()};
      p.admin_level = jp.value("admin_level", 10);
      p.provenance = jp.value("provenance", std::string("gazetteer"));
      if (jp.contains("surface")) {
        p.surface = jp["surface"].get<std::string>();
        p.begin = jp.at("span").at(0).get<std::size_t>();
        p.end = jp.at("span").at(1).get<std::size_t>();
      }
      r.places.push_back(std::move(p));
    }
    if (r.places.empty()) throw Error(ErrorCode::parse, "resolution has no places");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, std::string("malformed resolution: ") + e.what());
  }
}

}  // namespace geopulse::geo
