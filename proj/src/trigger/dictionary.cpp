#include "geopulse/trigger/dictionary.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "geopulse/core/error.h"
#include "geopulse/core/text.h"
#include "geopulse/trigger/stats.h"

namespace geopulse::trigger {

std::vector<std::string> Dictionary::terms() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& s : seeds) {
    if (seen.insert(text::fold(s)).second) out.push_back(s);
  }
  for (const auto& l : learned) {
    if (seen.insert(text::fold(l.term)).second) out.push_back(l.term);
  }
  return out;
}

Dictionary build_dictionary(std::span<const TokenizedPost> posts, std::span<const EventRecord> events,
                            const std::string& language, std::span<const std::string> seeds,
                            const DictionaryOptions& opts) {
  if (events.empty()) throw Error(ErrorCode::invalid_argument, "build_dictionary: no events given");
  Dictionary d;
  d.language = language;
  d.seeds.assign(seeds.begin(), seeds.end());
  d.options = opts;

  std::vector<const TokenizedPost*> subset;
  for (const auto& p : posts) {
    if (p.lang == language) subset.push_back(&p);
  }
  if (subset.empty()) return d;

  std::set<std::string> seed_keys;
  for (const auto& s : seeds) seed_keys.insert(text::fold(s));

  Timestamp from = subset.front()->created_at, to = from;
  std::map<std::string, std::int64_t> freq;
  for (const auto* p : subset) {
    from = std::min(from, p->created_at);
    to = std::max(to, p->created_at);
    for (const auto& t : p->tokens) ++freq[t];
  }
  from = floor_to(from, opts.bucket_width);
  to = floor_to(to, opts.bucket_width) + opts.bucket_width;
  auto n = static_cast<std::size_t>((to - from) / opts.bucket_width);
  if (n < 2) return d;

  std::map<std::string, std::vector<double>> series;
  for (const auto& [t, f] : freq) {
    if (f >= opts.min_freq && !seed_keys.count(t)) series[t].assign(n, 0.0);
  }
  if (series.empty()) return d;
  for (const auto* p : subset) {
    auto b = static_cast<std::size_t>((p->created_at - from) / opts.bucket_width);
    for (const auto& t : p->tokens) {
      auto it = series.find(t);
      if (it != series.end()) it->second[b] += 1.0;
    }
  }
  auto activity = event_activity(events, from, opts.bucket_width, n);

  std::vector<LearnedTerm> scored;
  for (const auto& [t, s] : series) {
    double r = pearson(s, activity);
    if (r >= opts.min_corr) scored.push_back({t, r, freq[t]});
  }
  std::sort(scored.begin(), scored.end(), [](const LearnedTerm& a, const LearnedTerm& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.term < b.term;
  });
  if (scored.size() > opts.k) scored.resize(opts.k);
  d.learned = std::move(scored);
  return d;
}

Dictionary build_dictionary(std::span<const Post> posts, std::span<const EventRecord> events,
                            const std::string& language, std::span<const std::string> seeds,
                            const DictionaryOptions& opts) {
  auto tokenized = tokenize_posts(posts);
  return build_dictionary(tokenized, events, language, seeds, opts);
}

nlohmann::json to_json(const Dictionary& d) {
  nlohmann::json learned = nlohmann::json::array();
  for (const auto& l : d.learned) {
    learned.push_back({{"term", l.term}, {"score", l.score}, {"frequency", l.frequency}});
  }
  return {{"language", d.language},
          {"seeds", d.seeds},
          {"learned", learned},
          {"k", d.options.k},
          {"min_freq", d.options.min_freq},
          {"min_corr", d.options.min_corr},
          {"bucket_width_s", d.options.bucket_width.count()}};
}

Dictionary dictionary_from_json(const nlohmann::json& j) {
  try {
    Dictionary d;
    d.language = j.at("language").get<std::string>();
    d.seeds = j.at("seeds").get<std::vector<std::string>>();
    for (const auto& l : j.at("learned")) {
      d.learned.push_back({l.at("term").get<std::string>(), l.at("score").get<double>(),
                           l.value("frequency", std::int64_t{0})});
    }
    d.options.k = j.value("k", std::size_t{25});
    d.options.min_freq = j.value("min_freq", std::int64_t{50});
    d.options.min_corr = j.value("min_corr", 0.3);
    d.options.bucket_width = Seconds{j.value("bucket_width_s", std::int64_t{3600})};
    if (d.options.bucket_width.count() <= 0) throw Error(ErrorCode::validation, "bucket_width_s must be positive");
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, std::string("malformed dictionary: ") + e.what());
  }
}

void save_dictionary(const std::filesystem::path& path, const Dictionary& d) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << to_json(d).dump(2) << '\n';
}

Dictionary load_dictionary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::not_found, "dictionary not found: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, "malformed dictionary " + path.string() + ": " + e.what());
  }
  return dictionary_from_json(j);
}

}  // namespace geopulse::trigger
